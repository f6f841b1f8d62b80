#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "navprompt/errors.hpp"

namespace navprompt {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double euclidean(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Weighted undirected graph of 3D-positioned viewpoints. Edge weights are
/// the Euclidean distances between endpoints. The graph may be disconnected;
/// distances across components are infinite.
class NavGraph {
 public:
  void add_node(const std::string& id, const Vec3& position) {
    if (index_.count(id)) throw Error("duplicate node id: " + id);
    index_.emplace(id, static_cast<int>(ids_.size()));
    ids_.push_back(id);
    positions_.push_back(position);
    adjacency_.emplace_back();
  }

  void add_edge(const std::string& a, const std::string& b) {
    const int ia = require(a);
    const int ib = require(b);
    if (ia == ib) throw Error("self-loop edge at node " + a);
    const double w = euclidean(positions_[static_cast<std::size_t>(ia)],
                               positions_[static_cast<std::size_t>(ib)]);
    if (w <= 0.0) throw Error("zero-length edge between " + a + " and " + b);
    adjacency_[static_cast<std::size_t>(ia)].emplace_back(ib, w);
    adjacency_[static_cast<std::size_t>(ib)].emplace_back(ia, w);
  }

  /// Sorts adjacency lists by node id so that neighbor enumeration is stable.
  void finalize() {
    for (std::size_t i = 0; i < adjacency_.size(); ++i) {
      auto& adj = adjacency_[i];
      std::sort(adj.begin(), adj.end(),
                [this](const std::pair<int, double>& a, const std::pair<int, double>& b) {
                  return ids_[static_cast<std::size_t>(a.first)] <
                         ids_[static_cast<std::size_t>(b.first)];
                });
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }

  bool has_node(const std::string& id) const { return index_.count(id) != 0; }

  std::size_t node_count() const { return ids_.size(); }

  const std::vector<std::string>& node_ids() const { return ids_; }

  const Vec3& position(const std::string& id) const {
    return positions_[static_cast<std::size_t>(require(id))];
  }

  bool adjacent(const std::string& a, const std::string& b) const {
    const int ia = require(a);
    const int ib = require(b);
    const auto& adj = adjacency_[static_cast<std::size_t>(ia)];
    return std::any_of(adj.begin(), adj.end(),
                       [ib](const std::pair<int, double>& e) { return e.first == ib; });
  }

  /// Neighbor ids of `id` in stable (id-sorted) order.
  std::vector<std::string> neighbors(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [j, w] : adjacency_[static_cast<std::size_t>(require(id))]) {
      out.push_back(ids_[static_cast<std::size_t>(j)]);
    }
    return out;
  }

  double edge_weight(const std::string& a, const std::string& b) const {
    const int ia = require(a);
    const int ib = require(b);
    for (const auto& [j, w] : adjacency_[static_cast<std::size_t>(ia)]) {
      if (j == ib) return w;
    }
    throw Error("no edge between " + a + " and " + b);
  }

  /// Shortest-path distances from `from` to every node, by Dijkstra.
  std::vector<double> distances_from(const std::string& from) const {
    return dijkstra(require(from)).first;
  }

  double distance_at(const std::vector<double>& dists, const std::string& to) const {
    return dists[static_cast<std::size_t>(require(to))];
  }

  /// Geodesic (shortest-path) distance in meters; infinite when disconnected.
  double geodesic(const std::string& a, const std::string& b) const {
    const int ia = require(a);
    const int ib = require(b);
    if (ia == ib) return 0.0;
    return dijkstra(ia).first[static_cast<std::size_t>(ib)];
  }

  /// A canonical shortest path from `a` to `b`. Among equally short paths the
  /// predecessor with the smaller node index wins, so the result is stable.
  /// Empty when `b` is unreachable.
  std::vector<std::string> shortest_path(const std::string& a,
                                         const std::string& b) const {
    const int ia = require(a);
    const int ib = require(b);
    const auto [dist, pred] = dijkstra(ia);
    if (std::isinf(dist[static_cast<std::size_t>(ib)])) return {};
    std::vector<std::string> path;
    for (int v = ib; v != -1; v = pred[static_cast<std::size_t>(v)]) {
      path.push_back(ids_[static_cast<std::size_t>(v)]);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

 private:
  int require(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownNode(id);
    return it->second;
  }

  std::pair<std::vector<double>, std::vector<int>> dijkstra(int source) const {
    std::vector<double> dist(ids_.size(), kInfiniteDistance);
    std::vector<int> pred(ids_.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    dist[static_cast<std::size_t>(source)] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > dist[static_cast<std::size_t>(u)]) continue;
      for (const auto& [v, w] : adjacency_[static_cast<std::size_t>(u)]) {
        const double nd = d + w;
        auto& dv = dist[static_cast<std::size_t>(v)];
        auto& pv = pred[static_cast<std::size_t>(v)];
        if (nd < dv) {
          dv = nd;
          pv = u;
          queue.emplace(nd, v);
        } else if (nd == dv && pv > u) {
          pv = u;
        }
      }
    }
    return {std::move(dist), std::move(pred)};
  }

  std::map<std::string, int> index_;
  std::vector<std::string> ids_;
  std::vector<Vec3> positions_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

/// Node sequence an agent traversed. Consecutive nodes must share an edge.
struct Trajectory {
  std::vector<std::string> node_ids;
};

inline void validate_trajectory(const NavGraph& graph, const Trajectory& traj) {
  if (traj.node_ids.empty()) throw InvalidTrajectory("trajectory has no nodes");
  for (const std::string& id : traj.node_ids) {
    if (!graph.has_node(id)) throw UnknownNode(id);
  }
  for (std::size_t i = 1; i < traj.node_ids.size(); ++i) {
    if (!graph.adjacent(traj.node_ids[i - 1], traj.node_ids[i])) {
      throw InvalidTrajectory("nodes " + traj.node_ids[i - 1] + " and " +
                              traj.node_ids[i] + " are not adjacent");
    }
  }
}

/// Sum of traversed edge weights.
inline double trajectory_length(const NavGraph& graph, const Trajectory& traj) {
  double total = 0.0;
  for (std::size_t i = 1; i < traj.node_ids.size(); ++i) {
    total += graph.edge_weight(traj.node_ids[i - 1], traj.node_ids[i]);
  }
  return total;
}

}  // namespace navprompt
