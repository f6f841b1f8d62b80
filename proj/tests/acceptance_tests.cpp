// Release gate for the toolkit. Each check prints exactly one [PASS]/[FAIL]
// line describing what it verified; the process exits non-zero when any check
// fails. Unlike the unit suite this binary is self-contained (no test
// framework) so it can run in stripped-down environments.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "navprompt/alignment.hpp"
#include "navprompt/clients.hpp"
#include "navprompt/dataset_eval.hpp"
#include "navprompt/instruction.hpp"
#include "navprompt/nav_graph.hpp"
#include "navprompt/nav_metrics.hpp"
#include "navprompt/pipeline.hpp"
#include "navprompt/records.hpp"
#include "test_util.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << s << " s";
  return out.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Gate {
  int failures = 0;

  void run(const std::string& name, const std::function<bool(std::string&)>& fn) {
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("unexpected exception: ") + e.what();
    }
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

// --- check 1: beam search equals the exhaustive search on small instances ---

navprompt::Candidate random_candidate(std::mt19937_64& rng, const std::string& ref) {
  const double score = static_cast<double>(rng() % 1001) / 1000.0;
  const int pos = static_cast<int>(rng() % 8);
  const int view = static_cast<int>(rng() % 4);
  const navprompt::BBox box{static_cast<double>(rng() % 50),
                            static_cast<double>(rng() % 50),
                            static_cast<double>(1 + rng() % 50),
                            static_cast<double>(1 + rng() % 50)};
  return testutil::make_candidate(score, pos, view, ref, box, 100, 100);
}

bool check_beam_equals_oracle(std::string& detail) {
  std::mt19937_64 rng(20240601);
  navprompt::AlignmentConfig cfg;
  cfg.beam_width = 625;
  cfg.beam_width_cap = 100000;

  const auto t0 = Clock::now();
  for (int iter = 0; iter < 200; ++iter) {
    const int phrases = 1 + static_cast<int>(rng() % 4);
    std::vector<navprompt::CandidateSet> sets;
    for (int p = 0; p < phrases; ++p) {
      navprompt::CandidateSet set;
      set.phrase_index = p;
      const int count = 1 + static_cast<int>(rng() % 5);
      for (int c = 0; c < count; ++c) {
        set.candidates.push_back(random_candidate(
            rng, "img-" + std::to_string(iter) + "-" + std::to_string(p) + "-" +
                     std::to_string(c)));
      }
      sets.push_back(std::move(set));
    }
    if (navprompt::effective_beam_width(cfg, sets) < 625) {
      detail = "effective beam width fell below the full search-space size";
      return false;
    }
    const navprompt::Selection oracle = navprompt::select_aligned_exhaustive(sets, cfg);
    const navprompt::Selection beam = navprompt::select_aligned_beam(sets, cfg);
    if (!(beam == oracle)) {
      detail = "beam diverged from the exhaustive result on instance " +
               std::to_string(iter);
      return false;
    }
  }
  const double elapsed = seconds_since(t0);
  detail = "200 instances, up to 4 phrases x 5 candidates, identical selections "
           "and scores in " + fmt_seconds(elapsed) + "; budget 5 s";
  return elapsed < 5.0;
}

// --- check 2: pairwise order score vs. brute-force pair counting ---

bool check_sequence_score_brute_force(std::string& detail) {
  std::mt19937_64 rng(77220011);
  for (int iter = 0; iter < 1000; ++iter) {
    const int n = static_cast<int>(rng() % 21);  // 0..20 keys

    std::vector<int> keys(static_cast<std::size_t>(n));
    for (int& k : keys) k = static_cast<int>(rng() % 10);
    double want = 1.0;
    if (n > 1) {
      long long concordant = 0;
      for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
          if (keys[static_cast<std::size_t>(i)] <= keys[static_cast<std::size_t>(j)]) {
            ++concordant;
          }
        }
      }
      want = 4.0 * static_cast<double>(concordant) /
                 (static_cast<double>(n) * static_cast<double>(n - 1)) -
             1.0;
    }
    if (navprompt::sequence_score(keys) != want) {
      detail = "integer keys diverged on iteration " + std::to_string(iter);
      return false;
    }

    std::vector<navprompt::OrderKey> order_keys(static_cast<std::size_t>(n));
    for (navprompt::OrderKey& k : order_keys) {
      k = {static_cast<int>(rng() % 6), static_cast<int>(rng() % 3)};
    }
    double want_keys = 1.0;
    if (n > 1) {
      long long concordant = 0;
      for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
          const navprompt::OrderKey& a = order_keys[static_cast<std::size_t>(i)];
          const navprompt::OrderKey& b = order_keys[static_cast<std::size_t>(j)];
          const bool le = a.path_position < b.path_position ||
                          (a.path_position == b.path_position &&
                           a.view_index <= b.view_index);
          if (le) ++concordant;
        }
      }
      want_keys = 4.0 * static_cast<double>(concordant) /
                      (static_cast<double>(n) * static_cast<double>(n - 1)) -
                  1.0;
    }
    if (navprompt::sequence_score(order_keys) != want_keys) {
      detail = "path-order keys diverged on iteration " + std::to_string(iter);
      return false;
    }
  }
  detail = "1000 random sequences of up to 20 keys, exact on both key types";
  return true;
}

// --- check 3: the decoy fixture separates order-aware from score-greedy ---

bool check_decoy_fixture(std::string& detail) {
  // One high-scoring candidate ("decoy") sits far down the path, a weaker one
  // ("good") sits before the second phrase's only candidate. Zero-area boxes
  // keep the box term out of the arithmetic.
  const navprompt::BBox flat{0, 0, 0, 0};
  navprompt::CandidateSet first;
  first.phrase_index = 0;
  first.candidates = {testutil::make_candidate(0.9, 5, 0, "decoy", flat),
                      testutil::make_candidate(0.6, 1, 0, "good", flat)};
  navprompt::CandidateSet second;
  second.phrase_index = 1;
  second.candidates = {testutil::make_candidate(0.9, 2, 0, "b", flat)};
  const std::vector<navprompt::CandidateSet> sets = {first, second};

  const navprompt::Selection aligned = navprompt::select_aligned_exhaustive(sets);
  const navprompt::Selection beam = navprompt::select_aligned_beam(sets);
  const navprompt::Selection related = navprompt::select_related(sets);

  if (aligned.chosen.front().image_ref != "good") {
    detail = "order-aware search picked '" + aligned.chosen.front().image_ref +
             "' instead of the in-order candidate";
    return false;
  }
  if (std::abs(aligned.s_all - 1.375) > 1e-9) {
    detail = "order-aware combined score " + std::to_string(aligned.s_all) +
             " != 1.375";
    return false;
  }
  if (related.chosen.front().image_ref != "decoy") {
    detail = "score-greedy selection failed to take the decoy";
    return false;
  }
  if (std::abs(related.s_all - (-0.55)) > 1e-9) {
    detail = "score-greedy combined score " + std::to_string(related.s_all) +
             " != -0.55";
    return false;
  }
  if (!(beam == aligned)) {
    detail = "beam search disagreed with the exhaustive search";
    return false;
  }
  detail = "order-aware 1.375 vs score-greedy -0.55, both within 1e-9";
  return true;
}

// --- check 4: trajectory metrics on the line-graph fixture ---

bool check_line_graph_metrics(std::string& detail) {
  const navprompt::NavGraph g = testutil::line_graph();
  using navprompt::Trajectory;

  // Stops exactly at the 3 m success radius count as successes.
  if (!navprompt::success(g, Trajectory{{"A", "B", "C", "E"}}, "D")) {
    detail = "a stop exactly 3 m from the goal (via the near spur) was not a success";
    return false;
  }
  if (!navprompt::success(g, Trajectory{{"A", "B", "C", "D", "F"}}, "D")) {
    detail = "a stop exactly 3 m from the goal (far spur) was not a success";
    return false;
  }
  if (navprompt::success(g, Trajectory{{"A", "B"}}, "D")) {
    detail = "a stop 4 m from the goal counted as a success";
    return false;
  }

  // Detour of length 8 against a 6 m shortest path.
  const double detour_spl =
      navprompt::spl(g, Trajectory{{"A", "B", "C", "E", "C", "D"}}, "A", "D");
  if (detour_spl != 0.75) {
    detail = "length-weighted success " + std::to_string(detour_spl) + " != 0.75";
    return false;
  }

  // Early stop one node short of the reference.
  const double early = navprompt::ndtw(g, Trajectory{{"A", "B", "C"}},
                                       Trajectory{{"A", "B", "C", "D"}});
  if (std::abs(early - 0.8465) > 1e-4) {
    detail = "early-stop path similarity " + std::to_string(early) +
             " not within 1e-4 of 0.8465";
    return false;
  }

  const double gp = navprompt::goal_progress(g, Trajectory{{"A", "B", "C"}}, "A", "D");
  if (gp != 4.0) {
    detail = "goal progress " + std::to_string(gp) + " != 4.0";
    return false;
  }

  const Trajectory ref{{"A", "B", "C", "D"}};
  const double self = navprompt::ndtw(g, ref, ref);
  if (std::abs(self - 1.0) > 1e-12) {
    detail = "identical paths scored " + std::to_string(self) + " instead of 1";
    return false;
  }

  detail = "success boundary inclusive at 3 m, detour 6/8 = 0.75, early stop "
           "0.8465 +/- 1e-4, progress 4.0, self-similarity 1.0";
  return true;
}

// --- check 5: token-overlap scoring vs. exponential subsequence search ---

bool is_subsequence(const std::vector<std::string>& sub,
                    const std::vector<std::string>& seq) {
  std::size_t i = 0;
  for (const std::string& s : seq) {
    if (i < sub.size() && sub[i] == s) ++i;
  }
  return i == sub.size();
}

// Longest common subsequence by enumerating every subsequence of the shorter
// list and testing it against the longer one.
std::size_t brute_force_lcs(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
  const std::vector<std::string>& s = a.size() <= b.size() ? a : b;
  const std::vector<std::string>& t = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  const unsigned total = 1u << s.size();
  for (unsigned mask = 0; mask < total; ++mask) {
    const unsigned bits = static_cast<unsigned>(std::popcount(mask));
    if (bits <= best) continue;
    std::vector<std::string> sub;
    sub.reserve(bits);
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (mask & (1u << k)) sub.push_back(s[k]);
    }
    if (is_subsequence(sub, t)) best = bits;
  }
  return best;
}

bool rouge_pair_matches(const std::vector<std::string>& a,
                        const std::vector<std::string>& b) {
  const std::size_t brute = brute_force_lcs(a, b);
  if (navprompt::detail::lcs_length(a, b) != brute) return false;
  navprompt::RougeScore want;
  if (a.empty() && b.empty()) {
    want = {1.0, 1.0, 1.0};
  } else if (a.empty() || b.empty()) {
    want = {0.0, 0.0, 0.0};
  } else {
    want.precision = static_cast<double>(brute) / static_cast<double>(a.size());
    want.recall = static_cast<double>(brute) / static_cast<double>(b.size());
    want.f1 = want.precision + want.recall > 0.0
                  ? 2.0 * want.precision * want.recall /
                        (want.precision + want.recall)
                  : 0.0;
  }
  return navprompt::rouge_l(a, b) == want;
}

bool check_rouge_brute_force(std::string& detail) {
  // Every token list over a three-symbol alphabet, grouped by length.
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  std::vector<std::vector<std::vector<std::string>>> by_len(9);
  by_len[0] = {{}};
  for (std::size_t l = 1; l <= 8; ++l) {
    for (const auto& base : by_len[l - 1]) {
      for (const std::string& sym : alphabet) {
        auto next = base;
        next.push_back(sym);
        by_len[l].push_back(std::move(next));
      }
    }
  }

  std::size_t exhaustive_pairs = 0;
  // All pairs whose combined length fits in 8 tokens.
  for (std::size_t la = 0; la <= 8; ++la) {
    for (std::size_t lb = 0; la + lb <= 8; ++lb) {
      for (const auto& a : by_len[la]) {
        for (const auto& b : by_len[lb]) {
          if (!rouge_pair_matches(a, b)) {
            detail = "mismatch in the combined-length sweep";
            return false;
          }
          ++exhaustive_pairs;
        }
      }
    }
  }
  // All pairs with at most five tokens per side.
  for (std::size_t la = 0; la <= 5; ++la) {
    for (std::size_t lb = 0; lb <= 5; ++lb) {
      for (const auto& a : by_len[la]) {
        for (const auto& b : by_len[lb]) {
          if (!rouge_pair_matches(a, b)) {
            detail = "mismatch in the per-side sweep";
            return false;
          }
          ++exhaustive_pairs;
        }
      }
    }
  }
  // Random pairs reaching the 8 x 8 corner the exhaustive sweeps stop short of.
  std::mt19937_64 rng(90125);
  const auto random_list = [&rng, &alphabet] {
    std::vector<std::string> out(rng() % 9);
    for (std::string& s : out) s = alphabet[rng() % alphabet.size()];
    return out;
  };
  for (int iter = 0; iter < 2000; ++iter) {
    if (!rouge_pair_matches(random_list(), random_list())) {
      detail = "mismatch in the randomized sweep, iteration " + std::to_string(iter);
      return false;
    }
  }

  detail = std::to_string(exhaustive_pairs) +
           " exhaustive pairs (every split of up to 8 combined tokens, every "
           "pair up to 5 per side) + 2000 random pairs up to 8 per side, exact";
  return true;
}

// --- check 6: corpus builds are reproducible byte for byte ---

struct DeterminismFixture {
  std::vector<navprompt::InstructionRecord> instructions;
  std::vector<navprompt::CandidateSetRecord> candidates;
  std::vector<navprompt::AugmentRecord> augments;
  std::vector<navprompt::CaptionRecord> captions;
};

DeterminismFixture make_determinism_fixture() {
  DeterminismFixture fx;
  for (int i = 0; i < 30; ++i) {
    const std::string id = (i < 10 ? "ep-0" : "ep-") + std::to_string(i);
    std::vector<int> starts;
    switch (i % 4) {
      case 0: starts = {2, 4, 6}; break;
      case 1: starts = {3, 5}; break;
      case 2: starts = {1, 8}; break;
      default: starts = {5}; break;
    }
    if (i % 5 == 4) starts.clear();  // instructions without landmark phrases
    navprompt::InstructionRecord rec;
    rec.instr = testutil::make_instruction(id, 8, starts, {"n0", "n1", "n2", "n3"});
    fx.instructions.push_back(std::move(rec));

    if (i % 11 == 6) continue;  // nothing detectable anywhere
    const int phrase_count = static_cast<int>(starts.size());
    for (int p = 0; p < phrase_count; ++p) {
      if (i % 7 == 3 && p == 1) continue;  // per-phrase miss
      navprompt::CandidateSetRecord cand;
      cand.instruction_id = id;
      cand.set.phrase_index = p;
      const int count = 1 + (i + p) % 4;
      for (int c = 0; c < count; ++c) {
        const std::string ref = "im-" + std::to_string(i) + "-" +
                                std::to_string(p) + "-" + std::to_string(c);
        const navprompt::BBox box{static_cast<double>((i * 3 + c) % 20),
                                  static_cast<double>((p * 5) % 20),
                                  static_cast<double>(4 + (i + c) % 10),
                                  static_cast<double>(3 + (p + c) % 8)};
        cand.set.candidates.push_back(testutil::make_candidate(
            static_cast<double>((i * 7 + p * 3 + c * 5) % 11) / 10.0,
            (i + p + c) % 4, (i + c) % 3, ref, box, 64, 48));
        fx.captions.push_back({ref, "view of " + ref, navprompt::json::object()});
        if (i % 2 == 0 && c == 0) {
          fx.augments.push_back(
              {ref, {ref + "-alt1", ref + "-alt2"}, navprompt::json::object()});
        }
      }
      fx.candidates.push_back(std::move(cand));
    }
  }
  return fx;
}

bool check_reproducible_builds(std::string& detail) {
  const DeterminismFixture fx = make_determinism_fixture();
  navprompt::PipelineConfig cfg;
  cfg.gamma = 0.35;
  cfg.seed = 4242;

  const testutil::TempDir dir("acceptance_repro");
  const auto run = [&](int jobs, const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    navprompt::FixtureDetector detector(fx.candidates);
    navprompt::FixtureCaptioner captioner(fx.captions);
    const navprompt::AugmentStore store =
        navprompt::AugmentStore::from_records(fx.augments);
    const navprompt::CorpusResult res =
        navprompt::build_corpus(fx.instructions, detector, cfg, jobs, &captioner);
    navprompt::write_jsonl(out / "aligned.jsonl", res.aligned);
    navprompt::write_jsonl(out / "related.jsonl", res.related);
    navprompt::write_jsonl(out / "terminal.jsonl", res.terminal);
    navprompt::write_jsonl(out / "misses.jsonl", res.misses);
    navprompt::write_jsonl(out / "aligned_aug.jsonl",
                           navprompt::augment_corpus(res.aligned, store,
                                                     cfg.gamma, cfg.seed));
  };
  run(1, dir.path() / "run1");
  run(4, dir.path() / "run2");

  for (const char* name :
       {"aligned.jsonl", "related.jsonl", "terminal.jsonl", "misses.jsonl",
        "aligned_aug.jsonl"}) {
    const std::string first = slurp(dir.path() / "run1" / name);
    const std::string second = slurp(dir.path() / "run2" / name);
    if (first.empty()) {
      detail = std::string(name) + " came out empty";
      return false;
    }
    if (first != second) {
      detail = std::string(name) + " differs between runs";
      return false;
    }
  }
  detail = "30 instructions incl. miss and text-only fallbacks; five output "
           "files identical across runs with 1 and 4 worker threads";
  return true;
}

// --- check 7: image-swap rate tracks the configured probability ---

bool check_swap_rate(std::string& detail) {
  std::vector<navprompt::MmiRecord> records;
  std::vector<navprompt::AugmentRecord> augments;
  const std::vector<int> starts = {1, 3, 5, 7, 9, 11, 13, 15, 17, 19};
  for (int i = 0; i < 1000; ++i) {
    const navprompt::TextInstruction instr =
        testutil::make_instruction("g-" + std::to_string(i), 20, starts);
    std::vector<navprompt::VisualPrompt> prompts;
    for (int k = 0; k < 10; ++k) {
      const std::string ref = "img-" + std::to_string(i) + "-" + std::to_string(k);
      prompts.push_back(testutil::make_prompt(k, ref));
      augments.push_back(
          {ref, {ref + "-v0", ref + "-v1", ref + "-v2"}, navprompt::json::object()});
    }
    navprompt::MmiRecord rec;
    rec.mmi = navprompt::interleave(instr, std::move(prompts),
                                    navprompt::PromptSetting::Aligned);
    records.push_back(std::move(rec));
  }
  const navprompt::AugmentStore store = navprompt::AugmentStore::from_records(augments);

  const std::vector<navprompt::MmiRecord> swapped =
      navprompt::augment_corpus(records, store, 0.2, 987654321);
  std::size_t changed = 0;
  std::size_t total = 0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (std::size_t p = 0; p < records[r].mmi.prompts.size(); ++p) {
      ++total;
      if (swapped[r].mmi.prompts[p].image_ref != records[r].mmi.prompts[p].image_ref) {
        ++changed;
      }
    }
  }
  const double fraction = static_cast<double>(changed) / static_cast<double>(total);
  if (total != 10000) {
    detail = "expected 10000 prompts, built " + std::to_string(total);
    return false;
  }
  if (fraction < 0.18 || fraction > 0.22) {
    detail = "swap fraction " + std::to_string(fraction) +
             " outside [0.18, 0.22] for probability 0.2";
    return false;
  }

  const std::vector<navprompt::MmiRecord> untouched =
      navprompt::augment_corpus(records, store, 0.0, 987654321);
  if (!(untouched == records)) {
    detail = "probability 0 modified the corpus";
    return false;
  }

  std::ostringstream out;
  out << "swap fraction " << std::fixed << std::setprecision(4) << fraction
      << " over 10000 prompts at probability 0.2; probability 0 is the identity";
  detail = out.str();
  return true;
}

// --- check 8: beam alignment throughput on larger instances ---

bool check_alignment_throughput(std::string& detail) {
  std::mt19937_64 rng(555001);
  navprompt::AlignmentConfig cfg;
  cfg.beam_width_cap = 200;

  const auto t0 = Clock::now();
  double checksum = 0.0;
  for (int iter = 0; iter < 1000; ++iter) {
    const int phrases = 1 + static_cast<int>(rng() % 10);
    std::vector<navprompt::CandidateSet> sets;
    for (int p = 0; p < phrases; ++p) {
      navprompt::CandidateSet set;
      set.phrase_index = p;
      const int count = 1 + static_cast<int>(rng() % 20);
      for (int c = 0; c < count; ++c) {
        set.candidates.push_back(random_candidate(
            rng, "s-" + std::to_string(iter) + "-" + std::to_string(p) + "-" +
                     std::to_string(c)));
      }
      sets.push_back(std::move(set));
    }
    const navprompt::Selection sel = navprompt::select_aligned_beam(sets, cfg);
    if (sel.chosen.size() != static_cast<std::size_t>(phrases)) {
      detail = "selection dropped a phrase on instance " + std::to_string(iter);
      return false;
    }
    checksum += sel.s_all;
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream out;
  out << "1000 instructions, up to 10 phrases x 20 candidates, beam cap 200, "
      << fmt_seconds(elapsed) << " (budget 10 s), score sum " << std::fixed
      << std::setprecision(3) << checksum;
  detail = out.str();
  return elapsed < 10.0;
}

// --- check 9: phrase matching and viewpoint scoring edge cases ---

bool check_eval_edge_cases(std::string& detail) {
  const std::vector<std::string> phrases = {"blue chair", "wooden table", "lamp"};
  for (const navprompt::PhraseScorer scorer :
       {navprompt::PhraseScorer::Fuzzy, navprompt::PhraseScorer::RougeL}) {
    const double threshold = scorer == navprompt::PhraseScorer::Fuzzy
                                 ? navprompt::kDefaultFuzzyThreshold
                                 : navprompt::kDefaultRougeThreshold;
    const navprompt::PhraseMatchReport r =
        navprompt::phrase_set_prf(phrases, phrases, scorer, threshold);
    if (r.precision != 1.0 || r.recall != 1.0 || r.f1 != 1.0) {
      detail = "identical phrase sets missed a perfect score";
      return false;
    }
  }

  const navprompt::NavGraph g = testutil::line_graph();
  // Every selection lands next to its gold node, never on it.
  const navprompt::ViewpointReport vp = navprompt::viewpoint_accuracy(
      {"B", "C", "D", "E"}, {"A", "B", "C", "C"}, g);
  if (vp.matching != 0.0 || vp.neighboring != 1.0) {
    detail = "all-adjacent selections scored matching " +
             std::to_string(vp.matching) + ", neighboring " +
             std::to_string(vp.neighboring);
    return false;
  }
  detail = "identical phrase sets score 1/1/1 under both scorers; all-adjacent "
           "viewpoints score 0 exact, 1 neighboring";
  return true;
}

}  // namespace

int main() {
  std::cout << "navprompt acceptance checks\n";
  Gate gate;
  gate.run("beam search reproduces the exhaustive search on seeded small instances",
           check_beam_equals_oracle);
  gate.run("pairwise order score matches brute-force pair counting",
           check_sequence_score_brute_force);
  gate.run("order-aware selection beats score-greedy selection on the decoy fixture",
           check_decoy_fixture);
  gate.run("trajectory metrics hit their closed-form values on the line graph",
           check_line_graph_metrics);
  gate.run("token-overlap scoring equals exponential subsequence brute force",
           check_rouge_brute_force);
  gate.run("corpus builds with one seed are byte-identical across runs",
           check_reproducible_builds);
  gate.run("image-swap rate tracks the configured probability",
           check_swap_rate);
  gate.run("beam alignment clears 1000 large instructions inside its budget",
           check_alignment_throughput);
  gate.run("phrase matching and viewpoint scoring edge cases are exact",
           check_eval_edge_cases);

  if (gate.failures == 0) {
    std::cout << "all 9 checks passed\n";
    return 0;
  }
  std::cout << gate.failures << " of 9 checks failed\n";
  return 1;
}
