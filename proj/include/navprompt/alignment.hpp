#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "navprompt/errors.hpp"
#include "navprompt/instruction.hpp"

namespace navprompt {

/// Path-order key of a detector hit: position of the source node in the
/// instruction path, then the frame index within that node's panorama.
struct OrderKey {
  int path_position = 0;
  int view_index = 0;

  friend auto operator<=>(const OrderKey&, const OrderKey&) = default;
};

/// One detector hit for a landmark phrase. `node_id` names the source
/// viewpoint when the producer knows it; it plays no part in scoring.
struct Candidate {
  double detection_score = 0.0;  // in [0, 1]
  std::string image_ref;
  BBox bbox;
  int image_width = 0;
  int image_height = 0;
  OrderKey order_key;
  std::string node_id;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// All hits for one phrase. Storage order is score-descending with order-key
/// ties ascending, but every selection routine is insensitive to the order.
struct CandidateSet {
  int phrase_index = 0;
  std::vector<Candidate> candidates;
};

struct AlignmentConfig {
  double beta0 = 0.5;       // weight of the mean detection score
  double beta1 = 0.1;       // weight of the mean box-area score
  int beam_width = 50;
  int beam_width_cap = 1000;
};

/// A chosen candidate per phrase plus the component scores of the choice.
struct Selection {
  std::vector<Candidate> chosen;    // one per phrase, in phrase order
  std::vector<int> phrase_indices;  // phrase index behind each chosen entry
  double s_seq = 0.0;
  double s_det_avg = 0.0;
  double s_box_avg = 0.0;
  double s_all = 0.0;

  friend bool operator==(const Selection&, const Selection&) = default;
};

inline void validate_candidate(const Candidate& c) {
  if (c.detection_score < 0.0 || c.detection_score > 1.0) {
    throw Error("candidate '" + c.image_ref + "' has detection score outside [0, 1]");
  }
  if (c.image_width <= 0 || c.image_height <= 0) {
    throw Error("candidate '" + c.image_ref + "' has non-positive image dimensions");
  }
  if (c.bbox.x < 0.0 || c.bbox.y < 0.0 || c.bbox.w < 0.0 || c.bbox.h < 0.0 ||
      c.bbox.x + c.bbox.w > c.image_width ||
      c.bbox.y + c.bbox.h > c.image_height) {
    throw Error("candidate '" + c.image_ref + "' has a box outside its image");
  }
  if (c.order_key.path_position < 0) {
    throw Error("candidate '" + c.image_ref + "' has a negative path position");
  }
}

/// Restores the storage invariant: score descending, order-key ties ascending.
inline void normalize_candidate_set(CandidateSet& set) {
  std::stable_sort(set.candidates.begin(), set.candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.detection_score != b.detection_score) {
                       return a.detection_score > b.detection_score;
                     }
                     return a.order_key < b.order_key;
                   });
}

/// Order-consistency score of the selected images against phrase order:
/// 4c / (n(n-1)) - 1 over all pairs i < j, where a pair is concordant when
/// key_i <= key_j (equal keys count as concordant). A single key, or none,
/// is trivially ordered and scores 1.
template <typename Key>
double sequence_score(const std::vector<Key>& keys) {
  const std::size_t n = keys.size();
  if (n <= 1) return 1.0;
  long long concordant = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (keys[i] <= keys[j]) ++concordant;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  return 4.0 * static_cast<double>(concordant) / pairs - 1.0;
}

/// Relative box area: prefers candidates that fill more of their frame.
inline double bbox_score(const Candidate& c) {
  return (c.bbox.w * c.bbox.h) /
         (static_cast<double>(c.image_width) * static_cast<double>(c.image_height));
}

/// Scores a complete per-phrase choice:
/// s_all = s_seq + beta0 * mean(detection) + beta1 * mean(box area).
inline Selection combined_score(const std::vector<Candidate>& chosen,
                                const AlignmentConfig& cfg) {
  if (chosen.empty()) throw EmptySelection("cannot score an empty choice");
  Selection sel;
  sel.chosen = chosen;
  sel.phrase_indices.resize(chosen.size());
  std::vector<OrderKey> keys;
  keys.reserve(chosen.size());
  double det_sum = 0.0;
  double box_sum = 0.0;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    sel.phrase_indices[i] = static_cast<int>(i);
    keys.push_back(chosen[i].order_key);
    det_sum += chosen[i].detection_score;
    box_sum += bbox_score(chosen[i]);
  }
  const double n = static_cast<double>(chosen.size());
  sel.s_seq = sequence_score(keys);
  sel.s_det_avg = det_sum / n;
  sel.s_box_avg = box_sum / n;
  sel.s_all = sel.s_seq + cfg.beta0 * sel.s_det_avg + cfg.beta1 * sel.s_box_avg;
  return sel;
}

namespace detail {

/// Candidate identity used for every deterministic tie-break: path order
/// first, then view index and image reference; the remaining components only
/// matter when two candidates share all three.
inline auto tie_key(const Candidate& c) {
  return std::make_tuple(c.order_key.path_position, c.order_key.view_index,
                         std::cref(c.image_ref), c.detection_score, c.bbox.x,
                         c.bbox.y, c.bbox.w, c.bbox.h);
}

inline bool tie_less(const std::vector<Candidate>& a,
                     const std::vector<Candidate>& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const Candidate& x, const Candidate& y) { return tie_key(x) < tie_key(y); });
}

/// True when `a` beats `b`: larger s_all, then tie-smallest candidate tuple
/// sequence in phrase order.
inline bool selection_better(const Selection& a, const Selection& b) {
  if (a.s_all != b.s_all) return a.s_all > b.s_all;
  return tie_less(a.chosen, b.chosen);
}

inline void require_non_empty(const std::vector<CandidateSet>& sets) {
  for (const CandidateSet& s : sets) {
    if (s.candidates.empty()) throw EmptyCandidateSet(s.phrase_index);
  }
}

/// Working copy with candidates in canonical tie-key order, which makes every
/// search routine independent of the incoming list order.
inline std::vector<std::vector<Candidate>> canonical_sets(
    const std::vector<CandidateSet>& sets) {
  std::vector<std::vector<Candidate>> out;
  out.reserve(sets.size());
  for (const CandidateSet& s : sets) {
    std::vector<Candidate> cs = s.candidates;
    std::sort(cs.begin(), cs.end(), [](const Candidate& a, const Candidate& b) {
      return tie_key(a) < tie_key(b);
    });
    out.push_back(std::move(cs));
  }
  return out;
}

inline void fill_phrase_indices(Selection& sel,
                                const std::vector<CandidateSet>& sets) {
  sel.phrase_indices.clear();
  for (const CandidateSet& s : sets) sel.phrase_indices.push_back(s.phrase_index);
}

}  // namespace detail

/// Per-phrase argmax of the detection score, ignoring order quality. Ties go
/// to the smaller order key, then the lexicographically smaller image_ref.
inline Selection select_related(const std::vector<CandidateSet>& sets,
                                const AlignmentConfig& cfg = {}) {
  detail::require_non_empty(sets);
  std::vector<Candidate> chosen;
  chosen.reserve(sets.size());
  for (const CandidateSet& s : sets) {
    const Candidate* best = &s.candidates.front();
    for (const Candidate& c : s.candidates) {
      if (c.detection_score > best->detection_score ||
          (c.detection_score == best->detection_score &&
           detail::tie_key(c) < detail::tie_key(*best))) {
        best = &c;
      }
    }
    chosen.push_back(*best);
  }
  Selection sel = combined_score(chosen, cfg);
  detail::fill_phrase_indices(sel, sets);
  return sel;
}

inline constexpr std::uint64_t kDefaultOracleBound = 1'000'000;

/// Brute-force maximizer of s_all over the full cross product of candidate
/// sets. Serves as the ground-truth oracle for the beam search.
inline Selection select_aligned_exhaustive(
    const std::vector<CandidateSet>& sets, const AlignmentConfig& cfg = {},
    std::uint64_t oracle_bound = kDefaultOracleBound) {
  detail::require_non_empty(sets);
  double product = 1.0;
  for (const CandidateSet& s : sets) {
    product *= static_cast<double>(s.candidates.size());
  }
  if (product > static_cast<double>(oracle_bound)) {
    throw SearchSpaceTooLarge("search space of " + std::to_string(product) +
                              " combinations exceeds the oracle bound of " +
                              std::to_string(oracle_bound));
  }

  const auto pools = detail::canonical_sets(sets);
  const std::size_t n = pools.size();
  std::vector<std::size_t> counter(n, 0);
  std::vector<Candidate> combo(n);
  Selection best;
  bool have_best = false;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) combo[i] = pools[i][counter[i]];
    Selection sel = combined_score(combo, cfg);
    if (!have_best || detail::selection_better(sel, best)) {
      best = std::move(sel);
      have_best = true;
    }
    std::size_t d = n;
    while (d > 0) {
      --d;
      if (++counter[d] < pools[d].size()) break;
      counter[d] = 0;
      if (d == 0) {
        detail::fill_phrase_indices(best, sets);
        return best;
      }
    }
  }
}

/// Width actually used by the beam: grows with the mean candidate count per
/// phrase (one notch per four candidates) and is clamped by the cap.
inline int effective_beam_width(const AlignmentConfig& cfg,
                                const std::vector<CandidateSet>& sets) {
  double total = 0.0;
  for (const CandidateSet& s : sets) total += static_cast<double>(s.candidates.size());
  const double mean = sets.empty() ? 1.0 : total / static_cast<double>(sets.size());
  const double scale = std::ceil(mean / 4.0);
  const double width = static_cast<double>(cfg.beam_width) * std::max(1.0, scale);
  const double capped = std::min(width, static_cast<double>(cfg.beam_width_cap));
  return std::max(1, static_cast<int>(capped));
}

namespace detail {

struct BeamState {
  std::vector<int> assign;  // candidate index per processed phrase
  long long concordant = 0; // concordant pairs among assigned phrases
  double det_sum = 0.0;
  double box_sum = 0.0;
  double bound = 0.0;
};

/// One directional pass. `order` lists phrase positions in processing order;
/// the forward pass walks phrases left to right, the backward pass right to
/// left. States are ranked by an optimistic completion bound: the exact
/// partial contribution plus the best case for everything unassigned (every
/// remaining pair concordant, every remaining phrase at its max detection and
/// box score), so the bound never undercuts a reachable completion.
inline Selection beam_pass(const std::vector<std::vector<Candidate>>& pools,
                           const std::vector<int>& order,
                           const AlignmentConfig& cfg, int width) {
  const std::size_t n = pools.size();
  const double total_pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;

  // Best-possible remaining detection/box mass after each processing depth.
  std::vector<double> rem_det(n + 1, 0.0);
  std::vector<double> rem_box(n + 1, 0.0);
  for (std::size_t d = n; d-- > 0;) {
    const auto& pool = pools[static_cast<std::size_t>(order[d])];
    double max_det = 0.0;
    double max_box = 0.0;
    for (const Candidate& c : pool) {
      max_det = std::max(max_det, c.detection_score);
      max_box = std::max(max_box, bbox_score(c));
    }
    rem_det[d] = rem_det[d + 1] + max_det;
    rem_box[d] = rem_box[d + 1] + max_box;
  }

  const auto state_bound = [&](const BeamState& s, std::size_t assigned) {
    const double assigned_pairs =
        static_cast<double>(assigned) * static_cast<double>(assigned - 1) / 2.0;
    const double best_c = static_cast<double>(s.concordant) + total_pairs - assigned_pairs;
    const double seq = n <= 1 ? 1.0 : 4.0 * best_c / (2.0 * total_pairs) - 1.0;
    return seq + cfg.beta0 * (s.det_sum + rem_det[assigned]) / static_cast<double>(n) +
           cfg.beta1 * (s.box_sum + rem_box[assigned]) / static_cast<double>(n);
  };

  std::vector<BeamState> states(1);
  std::vector<BeamState> expanded;
  for (std::size_t d = 0; d < n; ++d) {
    const int phrase = order[d];
    const auto& pool = pools[static_cast<std::size_t>(phrase)];
    expanded.clear();
    expanded.reserve(states.size() * pool.size());
    for (const BeamState& s : states) {
      for (std::size_t ci = 0; ci < pool.size(); ++ci) {
        BeamState next = s;
        const Candidate& c = pool[ci];
        for (std::size_t prev = 0; prev < d; ++prev) {
          const Candidate& p =
              pools[static_cast<std::size_t>(order[prev])][static_cast<std::size_t>(next.assign[prev])];
          // Concordance is always judged in phrase order, whichever way the
          // pass walks.
          if (order[prev] < phrase ? p.order_key <= c.order_key
                                   : c.order_key <= p.order_key) {
            ++next.concordant;
          }
        }
        next.assign.push_back(static_cast<int>(ci));
        next.det_sum += c.detection_score;
        next.box_sum += bbox_score(c);
        next.bound = state_bound(next, d + 1);
        expanded.push_back(std::move(next));
      }
    }
    if (d + 1 < n && expanded.size() > static_cast<std::size_t>(width)) {
      std::sort(expanded.begin(), expanded.end(),
                [](const BeamState& a, const BeamState& b) {
                  if (a.bound != b.bound) return a.bound > b.bound;
                  return a.assign < b.assign;
                });
      expanded.resize(static_cast<std::size_t>(width));
    }
    states.swap(expanded);
  }

  // Score every surviving complete assignment exactly; the incremental sums
  // above only steer pruning.
  Selection best;
  bool have_best = false;
  std::vector<Candidate> combo(n);
  for (const BeamState& s : states) {
    for (std::size_t d = 0; d < n; ++d) {
      combo[static_cast<std::size_t>(order[d])] =
          pools[static_cast<std::size_t>(order[d])][static_cast<std::size_t>(s.assign[d])];
    }
    Selection sel = combined_score(combo, cfg);
    if (!have_best || selection_better(sel, best)) {
      best = std::move(sel);
      have_best = true;
    }
  }
  return best;
}

}  // namespace detail

/// Adaptive bidirectional beam search for the Aligned setting. Runs one beam
/// forward over the phrases and one backward, each keeping the
/// `effective_beam_width` best partial assignments per step, and returns the
/// better of the two complete results under the oracle's tie rule. Whenever
/// the effective width is at least the full cross-product size nothing is
/// ever pruned, so the result matches select_aligned_exhaustive exactly.
inline Selection select_aligned_beam(const std::vector<CandidateSet>& sets,
                                     const AlignmentConfig& cfg = {}) {
  detail::require_non_empty(sets);
  const auto pools = detail::canonical_sets(sets);
  const int width = effective_beam_width(cfg, sets);
  const std::size_t n = pools.size();
  std::vector<int> forward(n);
  for (std::size_t i = 0; i < n; ++i) forward[i] = static_cast<int>(i);
  std::vector<int> backward(forward.rbegin(), forward.rend());

  Selection best_fwd = detail::beam_pass(pools, forward, cfg, width);
  Selection best_bwd = detail::beam_pass(pools, backward, cfg, width);
  Selection best = detail::selection_better(best_bwd, best_fwd) ? std::move(best_bwd)
                                                                : std::move(best_fwd);
  detail::fill_phrase_indices(best, sets);
  return best;
}

/// Visual prompt for the last landmark of an aligned selection, the single
/// image handed out in the Terminal setting.
inline VisualPrompt derive_terminal(const Selection& aligned, int phrase_count) {
  if (aligned.chosen.empty()) {
    throw EmptySelection("cannot derive a terminal prompt from an empty selection");
  }
  const Candidate& c = aligned.chosen.back();
  const int phrase_index = aligned.phrase_indices.empty()
                               ? phrase_count - 1
                               : aligned.phrase_indices.back();
  if (phrase_index < 0 || phrase_index >= phrase_count) {
    throw InvalidPhraseIndex("terminal phrase index " + std::to_string(phrase_index) +
                             " out of range for " + std::to_string(phrase_count) +
                             " phrases");
  }
  VisualPrompt prompt;
  prompt.phrase_index = phrase_index;
  prompt.image_ref = c.image_ref;
  prompt.bbox = c.bbox;
  prompt.image_width = c.image_width;
  prompt.image_height = c.image_height;
  prompt.source = PromptSource{c.order_key.path_position, c.order_key.view_index, ""};
  return prompt;
}

}  // namespace navprompt
