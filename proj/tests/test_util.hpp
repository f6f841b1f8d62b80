#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "navprompt/alignment.hpp"
#include "navprompt/instruction.hpp"
#include "navprompt/nav_graph.hpp"

namespace testutil {

inline navprompt::Candidate make_candidate(double score, int path_position,
                                           int view_index = 0,
                                           const std::string& image_ref = "img",
                                           navprompt::BBox bbox = {0, 0, 10, 10},
                                           int width = 100, int height = 100) {
  navprompt::Candidate c;
  c.detection_score = score;
  c.image_ref = image_ref;
  c.bbox = bbox;
  c.image_width = width;
  c.image_height = height;
  c.order_key = {path_position, view_index};
  return c;
}

inline navprompt::VisualPrompt make_prompt(int phrase_index,
                                           const std::string& image_ref = "img",
                                           navprompt::BBox bbox = {0, 0, 10, 10},
                                           int width = 100, int height = 100) {
  navprompt::VisualPrompt p;
  p.phrase_index = phrase_index;
  p.image_ref = image_ref;
  p.bbox = bbox;
  p.image_width = width;
  p.image_height = height;
  return p;
}

/// Instruction with `token_count` tokens t1..tN and one single-token phrase
/// per entry of `phrase_starts` (1-based token positions).
inline navprompt::TextInstruction make_instruction(
    const std::string& id, int token_count, const std::vector<int>& phrase_starts,
    std::vector<std::string> path = {"n0", "n1"}) {
  navprompt::TextInstruction instr;
  instr.id = id;
  for (int i = 1; i <= token_count; ++i) instr.tokens.push_back("t" + std::to_string(i));
  for (const int start : phrase_starts) {
    instr.phrases.push_back({"t" + std::to_string(start), start, start});
  }
  instr.path_node_ids = std::move(path);
  navprompt::validate_instruction(instr);
  return instr;
}

/// The 6-node metric fixture: a 2 m spaced line A-B-C-D plus spur E above C
/// (1 m) and F above D (3 m).
inline navprompt::NavGraph line_graph() {
  navprompt::NavGraph g;
  g.add_node("A", {0, 0, 0});
  g.add_node("B", {2, 0, 0});
  g.add_node("C", {4, 0, 0});
  g.add_node("D", {6, 0, 0});
  g.add_node("E", {4, 1, 0});
  g.add_node("F", {6, 3, 0});
  g.add_edge("A", "B");
  g.add_edge("B", "C");
  g.add_edge("C", "D");
  g.add_edge("C", "E");
  g.add_edge("D", "F");
  g.finalize();
  return g;
}

/// Random connected graph over `n` nodes: a random spanning tree plus a few
/// extra edges, coordinates uniform in a 20 m box.
inline navprompt::NavGraph random_graph(std::mt19937_64& rng, int n,
                                        std::vector<std::string>* ids_out = nullptr) {
  navprompt::NavGraph g;
  std::vector<std::string> ids;
  const auto coord = [&rng] {
    return static_cast<double>(rng() % 2000) / 100.0;
  };
  for (int i = 0; i < n; ++i) {
    const std::string id = "v" + std::to_string(i);
    ids.push_back(id);
    g.add_node(id, {coord(), coord(), coord()});
  }
  for (int i = 1; i < n; ++i) {
    g.add_edge(ids[i], ids[rng() % i]);
  }
  const int extra = static_cast<int>(rng() % (n + 1));
  for (int e = 0; e < extra; ++e) {
    const int a = static_cast<int>(rng() % n);
    const int b = static_cast<int>(rng() % n);
    if (a == b) continue;
    if (!g.adjacent(ids[a], ids[b])) g.add_edge(ids[a], ids[b]);
  }
  g.finalize();
  if (ids_out != nullptr) *ids_out = ids;
  return g;
}

/// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("navprompt_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
