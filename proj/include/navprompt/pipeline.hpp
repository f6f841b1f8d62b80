#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "navprompt/alignment.hpp"
#include "navprompt/clients.hpp"
#include "navprompt/errors.hpp"
#include "navprompt/instruction.hpp"
#include "navprompt/nav_graph.hpp"
#include "navprompt/records.hpp"

namespace navprompt {

struct PipelineConfig {
  AlignmentConfig alignment;
  /// Probability that a prompt's image is swapped for a stored variant.
  double gamma = 0.2;
  std::uint64_t seed = 0;
  /// Largest candidate search space still solved exhaustively; larger
  /// instances fall back to beam search.
  std::uint64_t oracle_bound = kDefaultOracleBound;
};

inline void validate_pipeline_config(const PipelineConfig& cfg) {
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) {
    throw Error("gamma must lie in [0, 1]");
  }
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Per-record stream seed: stable under corpus reordering because it depends
/// only on the base seed, the record id, and the purpose tag.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view id,
                              std::string_view salt) {
  return splitmix(seed ^ splitmix(fnv1a(id) + 0x632be59bd9b4e019ull * fnv1a(salt)));
}

/// Uniform double in [0, 1) built from the top 53 bits so the value stream
/// is identical on every platform.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline std::vector<std::string> tokenize_whitespace(const std::string& text) {
  std::istringstream stream(text);
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

/// Asks the extractor for landmark phrases and validates the spans against
/// the whitespace tokenization of the text. Bad client output surfaces as
/// InvalidSpanFromClient rather than being silently repaired.
inline std::vector<PhraseSpan> run_extraction(const std::string& instruction_id,
                                              const std::string& text,
                                              ExtractorClient& client) {
  const std::vector<std::string> tokens = tokenize_whitespace(text);
  if (tokens.empty()) {
    throw Error("instruction '" + instruction_id + "' has no tokens");
  }
  std::vector<PhraseSpan> phrases = client.extract(instruction_id, text);
  TextInstruction probe;
  probe.id = instruction_id;
  probe.tokens = tokens;
  probe.phrases = phrases;
  probe.path_node_ids = {"probe"};
  try {
    validate_instruction(probe);
  } catch (const Error& e) {
    throw InvalidSpanFromClient("extractor output rejected: " + std::string(e.what()));
  }
  return phrases;
}

struct DetectionResult {
  /// One set per phrase that produced at least one candidate, in phrase order.
  std::vector<CandidateSet> sets;
  /// Phrase indices with zero candidates.
  std::vector<int> missed;
};

/// Runs the detector once per phrase over the given ordered node list and
/// validates every returned candidate. Phrases with no hits are recorded as
/// misses, not errors.
inline DetectionResult run_detection(const TextInstruction& instr,
                                     const std::vector<std::string>& nodes,
                                     DetectorClient& client) {
  DetectionResult result;
  for (int i = 0; i < static_cast<int>(instr.phrases.size()); ++i) {
    DetectionQuery query;
    query.instruction_id = instr.id;
    query.phrase_index = i;
    query.phrase_text = instr.phrases[i].text;
    query.nodes = nodes;
    std::vector<Candidate> candidates = client.detect(query);
    const std::string where =
        "instruction '" + instr.id + "' phrase " + std::to_string(i);
    for (const Candidate& c : candidates) {
      try {
        validate_candidate(c);
      } catch (const Error& e) {
        throw InvalidCandidateFromClient("detector output rejected for " + where +
                                         ": " + std::string(e.what()));
      }
      if (c.order_key.path_position < 0 ||
          c.order_key.path_position >= static_cast<int>(nodes.size())) {
        throw InvalidCandidateFromClient(
            "detector output rejected for " + where + ": path position " +
            std::to_string(c.order_key.path_position) + " outside the scanned " +
            std::to_string(nodes.size()) + " nodes");
      }
      if (c.order_key.view_index < 0) {
        throw InvalidCandidateFromClient("detector output rejected for " + where +
                                         ": negative view index");
      }
    }
    if (candidates.empty()) {
      result.missed.push_back(i);
      continue;
    }
    CandidateSet set;
    set.phrase_index = i;
    set.candidates = std::move(candidates);
    normalize_candidate_set(set);
    result.sets.push_back(std::move(set));
  }
  return result;
}

inline DetectionResult run_detection(const TextInstruction& instr,
                                     DetectorClient& client) {
  return run_detection(instr, instr.path_node_ids, client);
}

inline MissRecord make_miss(const std::string& instruction_id, int phrase_index,
                            const std::string& phrase_text,
                            const std::string& reason) {
  MissRecord miss;
  miss.instruction_id = instruction_id;
  miss.phrase_index = phrase_index;
  miss.phrase_text = phrase_text;
  miss.reason = reason;
  return miss;
}

namespace detail {

inline std::string node_for(const Candidate& c,
                            const std::vector<std::string>& nodes) {
  if (!c.node_id.empty()) return c.node_id;
  const int p = c.order_key.path_position;
  if (p >= 0 && p < static_cast<int>(nodes.size())) return nodes[p];
  return {};
}

inline ScoreBundle to_bundle(const Selection& sel) {
  return ScoreBundle{sel.s_seq, sel.s_det_avg, sel.s_box_avg, sel.s_all};
}

}  // namespace detail

/// Turns a scored selection into prompts, resolving each prompt's source
/// node id from the scanned node list.
inline std::vector<VisualPrompt> prompts_from_selection(
    const Selection& sel, const std::vector<std::string>& nodes) {
  if (sel.chosen.size() != sel.phrase_indices.size()) {
    throw Error("selection chose " + std::to_string(sel.chosen.size()) +
                " candidates for " + std::to_string(sel.phrase_indices.size()) +
                " phrase indices");
  }
  std::vector<VisualPrompt> prompts;
  prompts.reserve(sel.chosen.size());
  for (std::size_t k = 0; k < sel.chosen.size(); ++k) {
    const Candidate& c = sel.chosen[k];
    VisualPrompt p;
    p.phrase_index = sel.phrase_indices[k];
    p.image_ref = c.image_ref;
    p.bbox = c.bbox;
    p.image_width = c.image_width;
    p.image_height = c.image_height;
    p.source = PromptSource{c.order_key.path_position, c.order_key.view_index,
                            detail::node_for(c, nodes)};
    prompts.push_back(std::move(p));
  }
  return prompts;
}

struct SettingBundle {
  MmiRecord aligned;
  MmiRecord related;
  MmiRecord terminal;
  /// True when no phrase had candidates and all three records degrade to
  /// prompt-free text-only instructions.
  bool text_only_fallback = false;
};

namespace detail {

inline MmiRecord make_setting_record(const TextInstruction& instr,
                                     const Selection& sel,
                                     const std::vector<std::string>& nodes,
                                     PromptSetting setting) {
  MmiRecord rec;
  rec.mmi = interleave(instr, prompts_from_selection(sel, nodes), setting);
  validate_multimodal(rec.mmi);
  rec.scores = to_bundle(sel);
  return rec;
}

}  // namespace detail

/// Builds the three per-setting records for one instruction. The exhaustive
/// search is used whenever the candidate product fits the oracle bound;
/// otherwise beam search runs, and the per-phrase argmax result is kept
/// instead if pruning ever leaves the beam behind it.
inline SettingBundle build_settings(const TextInstruction& instr,
                                    const std::vector<CandidateSet>& sets,
                                    const std::vector<std::string>& nodes,
                                    const PipelineConfig& cfg = {}) {
  validate_instruction(instr);
  SettingBundle out;
  if (sets.empty()) {
    MmiRecord blank;
    blank.mmi = interleave(instr, {}, PromptSetting::TextOnly);
    out.aligned = blank;
    out.related = blank;
    out.terminal = std::move(blank);
    out.text_only_fallback = true;
    return out;
  }
  const int phrase_count = static_cast<int>(instr.phrases.size());
  for (const CandidateSet& s : sets) {
    if (s.phrase_index < 0 || s.phrase_index >= phrase_count) {
      throw InvalidPhraseIndex("candidate set names phrase " +
                               std::to_string(s.phrase_index) + " but '" +
                               instr.id + "' has " +
                               std::to_string(phrase_count) + " phrases");
    }
    if (s.candidates.empty()) throw EmptyCandidateSet(s.phrase_index);
  }

  bool within_bound = true;
  std::uint64_t product = 1;
  for (const CandidateSet& s : sets) {
    product *= s.candidates.size();
    if (product > cfg.oracle_bound) {
      within_bound = false;
      break;
    }
  }

  Selection aligned_sel =
      within_bound ? select_aligned_exhaustive(sets, cfg.alignment, cfg.oracle_bound)
                   : select_aligned_beam(sets, cfg.alignment);
  const Selection related_sel = select_related(sets, cfg.alignment);
  if (!within_bound && detail::selection_better(related_sel, aligned_sel)) {
    aligned_sel = related_sel;
  }

  out.aligned = detail::make_setting_record(instr, aligned_sel, nodes,
                                            PromptSetting::Aligned);
  out.related = detail::make_setting_record(instr, related_sel, nodes,
                                            PromptSetting::Related);

  Selection terminal_sel =
      combined_score({aligned_sel.chosen.back()}, cfg.alignment);
  terminal_sel.phrase_indices = {aligned_sel.phrase_indices.back()};
  VisualPrompt terminal_prompt = derive_terminal(aligned_sel, phrase_count);
  if (terminal_prompt.source && terminal_prompt.source->node_id.empty()) {
    terminal_prompt.source->node_id =
        detail::node_for(aligned_sel.chosen.back(), nodes);
  }
  MmiRecord terminal;
  terminal.mmi = interleave(instr, {std::move(terminal_prompt)},
                            PromptSetting::Terminal);
  validate_multimodal(terminal.mmi);
  terminal.scores = detail::to_bundle(terminal_sel);
  out.terminal = std::move(terminal);
  return out;
}

inline SettingBundle build_settings(const TextInstruction& instr,
                                    const std::vector<CandidateSet>& sets,
                                    const PipelineConfig& cfg = {}) {
  return build_settings(instr, sets, instr.path_node_ids, cfg);
}

/// Independently replaces each prompt's image with a uniformly chosen stored
/// variant with probability gamma. One uniform draw is consumed per prompt;
/// a variant index is drawn only when a swap actually happens, so the result
/// is a pure function of (mmi, store, gamma, seed).
inline MultiModalInstruction sample_augmented(const MultiModalInstruction& mmi,
                                              const AugmentStore& store,
                                              double gamma, std::uint64_t seed) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("gamma must lie in [0, 1]");
  MultiModalInstruction out = mmi;
  if (gamma == 0.0 || out.prompts.empty() || store.empty()) return out;
  std::mt19937_64 rng(detail::splitmix(seed));
  for (VisualPrompt& p : out.prompts) {
    const double u = detail::unit_draw(rng);
    if (u >= gamma) continue;
    const std::vector<std::string>* variants = store.variants_for(p.image_ref);
    if (variants == nullptr) continue;
    p.image_ref = (*variants)[rng() % variants->size()];
  }
  return out;
}

/// Applies sample_augmented to every record with a per-record seed derived
/// from (seed, record id), so results do not depend on corpus order.
inline std::vector<MmiRecord> augment_corpus(const std::vector<MmiRecord>& records,
                                             const AugmentStore& store,
                                             double gamma, std::uint64_t seed) {
  std::vector<MmiRecord> out = records;
  for (MmiRecord& rec : out) {
    rec.mmi = sample_augmented(rec.mmi, store, gamma,
                               detail::mix_seed(seed, rec.id(), "augment"));
  }
  return out;
}

/// Nodes an agent sees while pre-exploring: each pseudo-path node in visit
/// order followed by its neighbors, every node listed at first occurrence.
inline std::vector<std::string> pre_explore_scan_nodes(const Trajectory& pseudo_path,
                                                       const NavGraph& graph) {
  validate_trajectory(graph, pseudo_path);
  std::vector<std::string> scan;
  std::set<std::string> seen;
  const auto push = [&](const std::string& id) {
    if (seen.insert(id).second) scan.push_back(id);
  };
  for (const std::string& id : pseudo_path.node_ids) {
    push(id);
    for (const std::string& neighbor : graph.neighbors(id)) push(neighbor);
  }
  return scan;
}

struct PreExploreOutput {
  /// Aligned selection over the restricted scan, or a text-only fallback
  /// when nothing was detected.
  MmiRecord record;
  std::vector<MissRecord> misses;
  std::vector<std::string> scanned_nodes;
};

/// Detection restricted to the pseudo-path nodes and their neighbors, then
/// the usual aligned selection over whatever was found there.
inline PreExploreOutput pre_explore_build(const TextInstruction& instr,
                                          const Trajectory& pseudo_path,
                                          const NavGraph& graph,
                                          DetectorClient& detector,
                                          const PipelineConfig& cfg = {}) {
  validate_instruction(instr);
  PreExploreOutput out;
  out.scanned_nodes = pre_explore_scan_nodes(pseudo_path, graph);
  if (instr.phrases.empty()) {
    out.misses.push_back(make_miss(instr.id, -1, "", "no landmark phrases"));
    out.record.mmi = interleave(instr, {}, PromptSetting::TextOnly);
    return out;
  }
  DetectionResult det = run_detection(instr, out.scanned_nodes, detector);
  for (const int i : det.missed) {
    out.misses.push_back(make_miss(instr.id, i, instr.phrases[i].text,
                                   "no candidates on pre-explore scan"));
  }
  SettingBundle bundle = build_settings(instr, det.sets, out.scanned_nodes, cfg);
  out.record = std::move(bundle.aligned);
  return out;
}

struct CorpusResult {
  std::vector<MmiRecord> aligned;
  std::vector<MmiRecord> related;
  std::vector<MmiRecord> terminal;
  std::vector<MissRecord> misses;
};

namespace detail {

struct InstructionOutput {
  MmiRecord aligned;
  MmiRecord related;
  MmiRecord terminal;
  std::vector<MissRecord> misses;
};

inline InstructionOutput build_one(const TextInstruction& instr,
                                   DetectorClient& detector,
                                   const PipelineConfig& cfg,
                                   CaptionerClient* captioner) {
  InstructionOutput out;
  std::vector<CandidateSet> sets;
  if (instr.phrases.empty()) {
    out.misses.push_back(make_miss(instr.id, -1, "", "no landmark phrases"));
  } else {
    DetectionResult det = run_detection(instr, instr.path_node_ids, detector);
    for (const int i : det.missed) {
      out.misses.push_back(make_miss(instr.id, i, instr.phrases[i].text,
                                     "no candidates detected"));
    }
    sets = std::move(det.sets);
  }
  SettingBundle bundle = build_settings(instr, sets, instr.path_node_ids, cfg);
  out.aligned = std::move(bundle.aligned);
  out.related = std::move(bundle.related);
  out.terminal = std::move(bundle.terminal);
  if (captioner != nullptr && !out.terminal.mmi.prompts.empty()) {
    out.terminal.caption =
        captioner->caption(out.terminal.mmi.prompts.front().image_ref);
  }
  return out;
}

}  // namespace detail

/// Runs detection and setting construction over a whole instruction file.
/// Instructions are independent; with jobs > 1 they are processed by a small
/// worker pool (clients must tolerate concurrent calls — the bundled fixture
/// and HTTP clients do). Output order is fixed by instruction id regardless
/// of job count.
inline CorpusResult build_corpus(const std::vector<InstructionRecord>& instructions,
                                 DetectorClient& detector,
                                 const PipelineConfig& cfg = {}, int jobs = 1,
                                 CaptionerClient* captioner = nullptr) {
  validate_pipeline_config(cfg);
  const std::size_t n = instructions.size();
  std::vector<detail::InstructionOutput> outputs(n);
  std::vector<std::exception_ptr> failures(n);

  const auto work = [&](std::size_t i) {
    try {
      outputs[i] = detail::build_one(instructions[i].instr, detector, cfg, captioner);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          work(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return instructions[a].instr.id < instructions[b].instr.id;
  });

  CorpusResult result;
  result.aligned.reserve(n);
  result.related.reserve(n);
  result.terminal.reserve(n);
  for (const std::size_t i : order) {
    result.aligned.push_back(std::move(outputs[i].aligned));
    result.related.push_back(std::move(outputs[i].related));
    result.terminal.push_back(std::move(outputs[i].terminal));
    for (MissRecord& m : outputs[i].misses) {
      result.misses.push_back(std::move(m));
    }
  }
  return result;
}

}  // namespace navprompt
