#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "navprompt/errors.hpp"
#include "navprompt/nav_graph.hpp"

namespace navprompt {

/// Precision/recall/F1 of predicted phrases against gold phrases.
struct PhraseMatchReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t hits = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

/// Fractions of selected viewpoints that hit the gold viewpoint exactly, and
/// that hit it or one of its graph neighbors.
struct ViewpointReport {
  double matching = 0.0;
  double neighboring = 0.0;
  std::size_t pairs = 0;
};

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

namespace detail {

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  std::vector<std::size_t> prev(n + 1), curr(n + 1);
  for (std::size_t j = 0; j <= n; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({sub, prev[j] + 1, curr[j - 1] + 1});
    }
    std::swap(prev, curr);
  }
  return prev[n];
}

inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  std::vector<std::size_t> prev(n + 1, 0), curr(n + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
    std::fill(curr.begin(), curr.end(), 0);
  }
  return prev[n];
}

}  // namespace detail

/// Normalized character-level similarity:
/// 1 - editdistance(a, b) / max(|a|, |b|). Two empty strings score 1.
inline double fuzzy_similarity(const std::string& a, const std::string& b) {
  if (a.empty() && b.empty()) return 1.0;
  const double longest = static_cast<double>(std::max(a.size(), b.size()));
  return 1.0 - static_cast<double>(detail::edit_distance(a, b)) / longest;
}

/// LCS-based ROUGE-L over token lists: P = |LCS|/|pred|, R = |LCS|/|gold|,
/// F1 harmonic. An empty side scores zero, except two empty lists which are
/// a perfect match.
inline RougeScore rouge_l(const std::vector<std::string>& pred,
                          const std::vector<std::string>& gold) {
  if (pred.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  if (pred.empty() || gold.empty()) return {0.0, 0.0, 0.0};
  const double lcs = static_cast<double>(detail::lcs_length(pred, gold));
  RougeScore s;
  s.precision = lcs / static_cast<double>(pred.size());
  s.recall = lcs / static_cast<double>(gold.size());
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

enum class PhraseScorer { Fuzzy, RougeL };

inline std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) tokens.push_back(text.substr(i, j - i));
    i = j;
  }
  return tokens;
}

inline double phrase_similarity(const std::string& a, const std::string& b,
                                PhraseScorer scorer) {
  if (scorer == PhraseScorer::Fuzzy) return fuzzy_similarity(a, b);
  return rouge_l(split_tokens(a), split_tokens(b)).f1;
}

inline constexpr double kDefaultFuzzyThreshold = 0.8;
inline constexpr double kDefaultRougeThreshold = 0.5;

/// Greedy one-to-one matching of predicted phrases to gold phrases in
/// descending similarity order; pairs at or above the threshold count as
/// hits. P = hits/|pred|, R = hits/|gold|.
inline PhraseMatchReport phrase_set_prf(const std::vector<std::string>& pred,
                                        const std::vector<std::string>& gold,
                                        PhraseScorer scorer,
                                        double match_threshold) {
  PhraseMatchReport report;
  report.predicted = pred.size();
  report.gold = gold.size();
  if (pred.empty() && gold.empty()) {
    report.precision = report.recall = report.f1 = 1.0;
    return report;
  }
  if (pred.empty() || gold.empty()) return report;

  struct Pair {
    double sim;
    std::size_t pi;
    std::size_t gi;
  };
  std::vector<Pair> pairs;
  pairs.reserve(pred.size() * gold.size());
  for (std::size_t pi = 0; pi < pred.size(); ++pi) {
    for (std::size_t gi = 0; gi < gold.size(); ++gi) {
      const double sim = phrase_similarity(pred[pi], gold[gi], scorer);
      if (sim >= match_threshold) pairs.push_back({sim, pi, gi});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return std::tie(a.pi, a.gi) < std::tie(b.pi, b.gi);
  });

  std::vector<bool> pred_used(pred.size(), false);
  std::vector<bool> gold_used(gold.size(), false);
  for (const Pair& p : pairs) {
    if (pred_used[p.pi] || gold_used[p.gi]) continue;
    pred_used[p.pi] = true;
    gold_used[p.gi] = true;
    ++report.hits;
  }
  report.precision = static_cast<double>(report.hits) / static_cast<double>(pred.size());
  report.recall = static_cast<double>(report.hits) / static_cast<double>(gold.size());
  report.f1 = report.precision + report.recall > 0.0
                  ? 2.0 * report.precision * report.recall /
                        (report.precision + report.recall)
                  : 0.0;
  return report;
}

/// Fraction of selections hitting the gold viewpoint exactly, and hitting it
/// or a graph neighbor. Exact hits count as neighboring too.
inline ViewpointReport viewpoint_accuracy(const std::vector<std::string>& selections,
                                          const std::vector<std::string>& gold,
                                          const NavGraph& graph) {
  if (selections.size() != gold.size()) {
    throw Error("viewpoint_accuracy needs one gold viewpoint per selection");
  }
  ViewpointReport report;
  report.pairs = selections.size();
  if (selections.empty()) return report;
  std::size_t matching = 0;
  std::size_t neighboring = 0;
  for (std::size_t i = 0; i < selections.size(); ++i) {
    if (!graph.has_node(selections[i])) throw UnknownNode(selections[i]);
    if (!graph.has_node(gold[i])) throw UnknownNode(gold[i]);
    if (selections[i] == gold[i]) {
      ++matching;
      ++neighboring;
    } else if (graph.adjacent(selections[i], gold[i])) {
      ++neighboring;
    }
  }
  const double n = static_cast<double>(selections.size());
  report.matching = static_cast<double>(matching) / n;
  report.neighboring = static_cast<double>(neighboring) / n;
  return report;
}

}  // namespace navprompt
