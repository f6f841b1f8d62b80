#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "navprompt/errors.hpp"
#include "navprompt/nav_graph.hpp"

namespace navprompt {

inline constexpr double kSuccessThresholdMeters = 3.0;

/// Per-trajectory metric bundle.
struct EpisodeResult {
  bool success = false;
  double spl = 0.0;
  double ndtw = 0.0;
  double gp = 0.0;

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

/// Mean metrics over a result set. SR is a percentage, the rest keep their
/// native units.
struct MetricSummary {
  std::size_t episodes = 0;
  double sr = 0.0;
  double spl = 0.0;
  double ndtw = 0.0;
  double gp = 0.0;
};

/// Whether the agent stopped within `threshold` meters of the goal
/// (geodesic, boundary inclusive).
inline bool success(const NavGraph& graph, const Trajectory& traj,
                    const std::string& goal,
                    double threshold = kSuccessThresholdMeters) {
  if (traj.node_ids.empty()) throw InvalidTrajectory("trajectory has no nodes");
  return graph.geodesic(traj.node_ids.back(), goal) <= threshold;
}

/// Success weighted by path length: success * d* / max(d*, traversed length).
/// A zero-length shortest path collapses to plain success.
inline double spl(const NavGraph& graph, const Trajectory& traj,
                  const std::string& start, const std::string& goal,
                  double threshold = kSuccessThresholdMeters) {
  if (traj.node_ids.empty()) throw InvalidTrajectory("trajectory has no nodes");
  if (traj.node_ids.front() != start) {
    throw TrajectoryStartMismatch("trajectory starts at " + traj.node_ids.front() +
                                  ", expected " + start);
  }
  const bool ok = success(graph, traj, goal, threshold);
  if (!ok) return 0.0;
  const double optimal = graph.geodesic(start, goal);
  if (optimal == 0.0) return 1.0;
  const double traversed = trajectory_length(graph, traj);
  return optimal / std::max(optimal, traversed);
}

namespace detail {

/// Plain dynamic-time-warping cost between two node sequences under geodesic
/// node-to-node costs, with the usual three moves (advance both, advance
/// query, advance reference) and both sequences fully consumed.
inline double dtw_cost(const NavGraph& graph, const std::vector<std::string>& query,
                       const std::vector<std::string>& reference) {
  const std::size_t nq = query.size();
  const std::size_t nr = reference.size();
  std::map<std::string, std::vector<double>> rows;
  for (const std::string& q : query) {
    if (!rows.count(q)) rows.emplace(q, graph.distances_from(q));
  }

  const double inf = kInfiniteDistance;
  std::vector<double> prev(nr + 1, inf);
  std::vector<double> curr(nr + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= nq; ++i) {
    const auto& row = rows.at(query[i - 1]);
    curr[0] = inf;
    for (std::size_t j = 1; j <= nr; ++j) {
      const double cost = graph.distance_at(row, reference[j - 1]);
      const double best = std::min({prev[j - 1], prev[j], curr[j - 1]});
      curr[j] = cost + best;
    }
    std::swap(prev, curr);
  }
  return prev[nr];
}

}  // namespace detail

/// Normalized dynamic time warping: exp(-DTW / (|reference| * threshold)).
inline double ndtw(const NavGraph& graph, const Trajectory& traj,
                   const Trajectory& reference,
                   double threshold = kSuccessThresholdMeters) {
  if (traj.node_ids.empty() || reference.node_ids.empty()) {
    throw InvalidTrajectory("ndtw needs non-empty trajectories");
  }
  for (const std::string& id : traj.node_ids) {
    if (!graph.has_node(id)) throw UnknownNode(id);
  }
  for (const std::string& id : reference.node_ids) {
    if (!graph.has_node(id)) throw UnknownNode(id);
  }
  const double cost = detail::dtw_cost(graph, traj.node_ids, reference.node_ids);
  const double norm = static_cast<double>(reference.node_ids.size()) * threshold;
  return std::exp(-cost / norm);
}

/// Reduction in geodesic distance to the goal achieved by the episode:
/// geodesic(start, goal) - geodesic(stop, goal).
inline double goal_progress(const NavGraph& graph, const Trajectory& traj,
                            const std::string& start, const std::string& goal) {
  if (traj.node_ids.empty()) throw InvalidTrajectory("trajectory has no nodes");
  if (traj.node_ids.front() != start) {
    throw TrajectoryStartMismatch("trajectory starts at " + traj.node_ids.front() +
                                  ", expected " + start);
  }
  return graph.geodesic(start, goal) - graph.geodesic(traj.node_ids.back(), goal);
}

/// All four metrics for one episode against a reference path.
inline EpisodeResult evaluate_episode(const NavGraph& graph, const Trajectory& traj,
                                      const std::string& start, const std::string& goal,
                                      const Trajectory& reference,
                                      double threshold = kSuccessThresholdMeters) {
  EpisodeResult r;
  r.success = success(graph, traj, goal, threshold);
  r.spl = spl(graph, traj, start, goal, threshold);
  r.ndtw = ndtw(graph, traj, reference, threshold);
  r.gp = goal_progress(graph, traj, start, goal);
  return r;
}

/// Arithmetic means over episodes; SR reported as a percentage.
inline MetricSummary aggregate(const std::vector<EpisodeResult>& results) {
  if (results.empty()) throw EmptyResultSet("no episodes to aggregate");
  MetricSummary s;
  s.episodes = results.size();
  for (const EpisodeResult& r : results) {
    s.sr += r.success ? 1.0 : 0.0;
    s.spl += r.spl;
    s.ndtw += r.ndtw;
    s.gp += r.gp;
  }
  const double n = static_cast<double>(results.size());
  s.sr = 100.0 * s.sr / n;
  s.spl /= n;
  s.ndtw /= n;
  s.gp /= n;
  return s;
}

}  // namespace navprompt
