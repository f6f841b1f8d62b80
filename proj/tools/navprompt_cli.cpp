#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "navprompt/clients.hpp"
#include "navprompt/config.hpp"
#include "navprompt/dataset_eval.hpp"
#include "navprompt/nav_graph.hpp"
#include "navprompt/nav_metrics.hpp"
#include "navprompt/pipeline.hpp"
#include "navprompt/records.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Flags shared by every subcommand. Optionals stay empty unless the flag was
/// given, so values from --config are only overridden explicitly.
struct CommonOpts {
  std::string config_path;
  bool summary = false;
  int jobs = 1;
  std::optional<double> beta0;
  std::optional<double> beta1;
  std::optional<double> gamma;
  std::optional<int> beam_width;
  std::optional<int> beam_width_cap;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> oracle_bound;
  std::optional<std::string> server_url;
  std::optional<int> timeout_ms;
  std::optional<int> retries;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts, bool with_jobs) {
  cmd->add_option("--config", opts.config_path,
                  "Key=value config file (flags win over file values)");
  cmd->add_flag("--summary", opts.summary,
                "Print a machine-readable JSON summary to stdout");
  if (with_jobs) {
    cmd->add_option("--jobs", opts.jobs, "Worker threads over instructions")
        ->check(CLI::PositiveNumber);
  }
  cmd->add_option("--beta0", opts.beta0, "Weight of the mean detection score");
  cmd->add_option("--beta1", opts.beta1, "Weight of the mean box-area score");
  cmd->add_option("--gamma", opts.gamma, "Augmentation substitution probability");
  cmd->add_option("--beam-width", opts.beam_width, "Base beam width");
  cmd->add_option("--beam-width-cap", opts.beam_width_cap,
                  "Upper bound on the adaptive beam width");
  cmd->add_option("--seed", opts.seed, "Base random seed");
  cmd->add_option("--oracle-bound", opts.oracle_bound,
                  "Largest candidate product solved exhaustively");
  cmd->add_option("--server-url", opts.server_url,
                  "Remote client endpoint, e.g. http://localhost:8080");
  cmd->add_option("--timeout-ms", opts.timeout_ms, "Remote request timeout");
  cmd->add_option("--retries", opts.retries, "Remote request retries");
}

navprompt::ToolConfig resolve_config(const CommonOpts& opts) {
  navprompt::ToolConfig cfg;
  if (!opts.config_path.empty()) cfg = navprompt::load_config_file(opts.config_path);
  if (opts.beta0) cfg.pipeline.alignment.beta0 = *opts.beta0;
  if (opts.beta1) cfg.pipeline.alignment.beta1 = *opts.beta1;
  if (opts.gamma) cfg.pipeline.gamma = *opts.gamma;
  if (opts.beam_width) cfg.pipeline.alignment.beam_width = *opts.beam_width;
  if (opts.beam_width_cap) cfg.pipeline.alignment.beam_width_cap = *opts.beam_width_cap;
  if (opts.seed) cfg.pipeline.seed = *opts.seed;
  if (opts.oracle_bound) cfg.pipeline.oracle_bound = *opts.oracle_bound;
  if (opts.server_url) cfg.remote.base_url = *opts.server_url;
  if (opts.timeout_ms) cfg.remote.timeout_ms = *opts.timeout_ms;
  if (opts.retries) cfg.remote.retries = *opts.retries;
  navprompt::validate_pipeline_config(cfg.pipeline);
  return cfg;
}

void emit(const json& summary, const std::string& human, bool want_summary) {
  if (want_summary) {
    std::cout << summary.dump() << "\n";
  } else {
    std::cout << human;
  }
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

// ---------------------------------------------------------------- align

struct AlignArgs {
  std::string instructions;
  std::string candidates;
  std::string setting = "aligned";
  std::string out;
};

void run_align(const AlignArgs& args, const CommonOpts& common) {
  const navprompt::ToolConfig cfg = resolve_config(common);
  const auto parsed_setting = navprompt::parse_setting(args.setting);
  if (!parsed_setting) {
    throw navprompt::Error("unknown setting '" + args.setting +
                           "' (expected aligned | related | terminal | text_only)");
  }
  const navprompt::PromptSetting setting = *parsed_setting;
  auto instructions = navprompt::read_jsonl<navprompt::InstructionRecord>(args.instructions);

  std::vector<navprompt::MmiRecord> records;
  std::vector<navprompt::MissRecord> misses;
  if (setting == navprompt::PromptSetting::TextOnly) {
    for (const auto& rec : instructions) {
      navprompt::MmiRecord out;
      out.mmi = navprompt::interleave(rec.instr, {}, navprompt::PromptSetting::TextOnly);
      records.push_back(std::move(out));
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const auto& a, const auto& b) { return a.id() < b.id(); });
  } else {
    if (args.candidates.empty()) {
      throw navprompt::Error("--candidates is required for setting '" + args.setting + "'");
    }
    navprompt::FixtureDetector detector(
        navprompt::read_jsonl<navprompt::CandidateSetRecord>(args.candidates));
    navprompt::CorpusResult corpus =
        navprompt::build_corpus(instructions, detector, cfg.pipeline, common.jobs);
    switch (setting) {
      case navprompt::PromptSetting::Aligned: records = std::move(corpus.aligned); break;
      case navprompt::PromptSetting::Related: records = std::move(corpus.related); break;
      default: records = std::move(corpus.terminal); break;
    }
    misses = std::move(corpus.misses);
  }

  fs::create_directories(args.out);
  const fs::path dataset_path =
      fs::path(args.out) / (std::string(navprompt::to_string(setting)) + ".jsonl");
  const fs::path miss_path = fs::path(args.out) / "misses.jsonl";
  navprompt::write_jsonl(dataset_path, records);
  navprompt::write_jsonl(miss_path, misses);

  const json summary = {{"command", "align"},
                        {"setting", navprompt::to_string(setting)},
                        {"instructions", instructions.size()},
                        {"records", records.size()},
                        {"misses", misses.size()},
                        {"dataset", dataset_path.string()}};
  emit(summary,
       "wrote " + std::to_string(records.size()) + " " + navprompt::to_string(setting) +
           " records to " + dataset_path.string() + " (" + std::to_string(misses.size()) +
           " misses)\n",
       common.summary);
}

// ---------------------------------------------------------------- build

struct BuildArgs {
  std::string instructions;
  std::string candidates;
  std::string captions;
  std::string augments;
  std::string out;
  bool caption_terminal = false;
};

void run_build(const BuildArgs& args, const CommonOpts& common) {
  const navprompt::ToolConfig cfg = resolve_config(common);
  auto instructions = navprompt::read_jsonl<navprompt::InstructionRecord>(args.instructions);

  std::unique_ptr<navprompt::ExtractorClient> extractor;
  std::unique_ptr<navprompt::DetectorClient> detector;
  std::unique_ptr<navprompt::CaptionerClient> captioner;
  const bool remote = !cfg.remote.base_url.empty();
  if (remote) {
    extractor = std::make_unique<navprompt::HttpExtractor>(cfg.remote);
    detector = std::make_unique<navprompt::HttpDetector>(cfg.remote);
    if (args.caption_terminal) {
      captioner = std::make_unique<navprompt::HttpCaptioner>(cfg.remote);
    }
  } else {
    if (args.candidates.empty()) {
      throw navprompt::Error("--candidates is required when no server_url is set");
    }
    detector = std::make_unique<navprompt::FixtureDetector>(
        navprompt::read_jsonl<navprompt::CandidateSetRecord>(args.candidates));
    if (!args.captions.empty()) {
      captioner = std::make_unique<navprompt::FixtureCaptioner>(
          navprompt::read_jsonl<navprompt::CaptionRecord>(args.captions));
    }
  }

  std::size_t extracted = 0;
  if (extractor) {
    for (auto& rec : instructions) {
      if (!rec.instr.phrases.empty()) continue;
      rec.instr.phrases = navprompt::run_extraction(
          rec.instr.id, join_tokens(rec.instr.tokens), *extractor);
      navprompt::validate_instruction(rec.instr);
      ++extracted;
    }
  }

  navprompt::CorpusResult corpus = navprompt::build_corpus(
      instructions, *detector, cfg.pipeline, common.jobs, captioner.get());

  fs::create_directories(args.out);
  const fs::path out_dir(args.out);
  navprompt::write_jsonl(out_dir / "aligned.jsonl", corpus.aligned);
  navprompt::write_jsonl(out_dir / "related.jsonl", corpus.related);
  navprompt::write_jsonl(out_dir / "terminal.jsonl", corpus.terminal);
  navprompt::write_jsonl(out_dir / "misses.jsonl", corpus.misses);

  bool augmented = false;
  if (!args.augments.empty()) {
    const navprompt::AugmentStore store = navprompt::AugmentStore::from_records(
        navprompt::read_jsonl<navprompt::AugmentRecord>(args.augments));
    navprompt::write_jsonl(out_dir / "aligned_aug.jsonl",
                           navprompt::augment_corpus(corpus.aligned, store,
                                                     cfg.pipeline.gamma, cfg.pipeline.seed));
    navprompt::write_jsonl(out_dir / "related_aug.jsonl",
                           navprompt::augment_corpus(corpus.related, store,
                                                     cfg.pipeline.gamma, cfg.pipeline.seed));
    navprompt::write_jsonl(out_dir / "terminal_aug.jsonl",
                           navprompt::augment_corpus(corpus.terminal, store,
                                                     cfg.pipeline.gamma, cfg.pipeline.seed));
    augmented = true;
  }

  const json summary = {{"command", "build"},
                        {"instructions", instructions.size()},
                        {"extracted", extracted},
                        {"records_per_setting", corpus.aligned.size()},
                        {"misses", corpus.misses.size()},
                        {"augmented", augmented},
                        {"out", out_dir.string()}};
  emit(summary,
       "built " + std::to_string(corpus.aligned.size()) +
           " records per setting in " + out_dir.string() + " (" +
           std::to_string(corpus.misses.size()) + " misses)\n",
       common.summary);
}

// ---------------------------------------------------------------- eval-nav

struct EvalNavArgs {
  std::string graph;
  std::string trajectories;
  std::string out;
  double threshold = navprompt::kSuccessThresholdMeters;
};

void run_eval_nav(const EvalNavArgs& args, const CommonOpts& common) {
  const navprompt::NavGraph graph = navprompt::load_graph(args.graph);
  const auto trajectories =
      navprompt::read_jsonl<navprompt::TrajectoryRecord>(args.trajectories);
  if (trajectories.empty()) throw navprompt::EmptyResultSet("no trajectories to evaluate");

  std::vector<navprompt::EpisodeResult> results;
  json episodes = json::array();
  for (const auto& rec : trajectories) {
    std::vector<std::string> reference_nodes;
    if (rec.reference) {
      reference_nodes = *rec.reference;
      if (reference_nodes.empty() || reference_nodes.front() != rec.start ||
          reference_nodes.back() != rec.goal) {
        throw navprompt::InvalidTrajectory(
            "reference for instruction '" + rec.instruction_id +
            "' must run from its start node to its goal node");
      }
    } else {
      reference_nodes = graph.shortest_path(rec.start, rec.goal);
      if (reference_nodes.empty()) {
        throw navprompt::InvalidTrajectory("goal '" + rec.goal +
                                           "' is unreachable from start '" + rec.start +
                                           "' for instruction '" + rec.instruction_id + "'");
      }
    }
    const navprompt::Trajectory predicted{rec.nodes};
    navprompt::validate_trajectory(graph, predicted);
    const navprompt::Trajectory reference{reference_nodes};
    const navprompt::EpisodeResult r = navprompt::evaluate_episode(
        graph, predicted, rec.start, rec.goal, reference, args.threshold);
    results.push_back(r);
    episodes.push_back({{"instruction_id", rec.instruction_id},
                        {"success", r.success},
                        {"spl", r.spl},
                        {"ndtw", r.ndtw},
                        {"gp", r.gp}});
  }
  const navprompt::MetricSummary m = navprompt::aggregate(results);

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw navprompt::IoError("cannot open '" + args.out + "' for writing");
    for (const json& e : episodes) out << e.dump() << "\n";
  }

  const json summary = {{"command", "eval-nav"}, {"episodes", m.episodes},
                        {"sr", m.sr},           {"spl", m.spl},
                        {"ndtw", m.ndtw},       {"gp", m.gp}};
  std::ostringstream human;
  human << "episodes: " << m.episodes << "\n"
        << "SR: " << m.sr << "%\n"
        << "SPL: " << m.spl << "\n"
        << "nDTW: " << m.ndtw << "\n"
        << "GP: " << m.gp << "\n";
  emit(summary, human.str(), common.summary);
}

// ---------------------------------------------------------------- eval-phrases

struct EvalPhrasesArgs {
  std::string predicted;
  std::string gold;
  std::string scorer = "fuzzy";
  std::optional<double> threshold;
};

template <typename Record>
std::map<std::string, const Record*> index_by_id(const std::vector<Record>& records) {
  std::map<std::string, const Record*> index;
  for (const Record& r : records) {
    if (!index.emplace(r.instruction_id, &r).second) {
      throw navprompt::Error("duplicate record for instruction '" + r.instruction_id + "'");
    }
  }
  return index;
}

void run_eval_phrases(const EvalPhrasesArgs& args, const CommonOpts& common) {
  const auto predicted = navprompt::read_jsonl<navprompt::GoldRecord>(args.predicted);
  const auto gold = navprompt::read_jsonl<navprompt::GoldRecord>(args.gold);
  if (gold.empty()) throw navprompt::EmptyResultSet("no gold records to evaluate against");

  navprompt::PhraseScorer scorer;
  double threshold;
  if (args.scorer == "fuzzy") {
    scorer = navprompt::PhraseScorer::Fuzzy;
    threshold = args.threshold.value_or(navprompt::kDefaultFuzzyThreshold);
  } else if (args.scorer == "rouge") {
    scorer = navprompt::PhraseScorer::RougeL;
    threshold = args.threshold.value_or(navprompt::kDefaultRougeThreshold);
  } else {
    throw navprompt::Error("unknown scorer '" + args.scorer + "' (expected fuzzy or rouge)");
  }

  const auto pred_index = index_by_id(predicted);
  const auto gold_index = index_by_id(gold);
  for (const auto& [id, rec] : gold_index) {
    (void)rec;
    if (pred_index.find(id) == pred_index.end()) {
      throw navprompt::Error("no predicted record for instruction '" + id + "'");
    }
  }
  for (const auto& [id, rec] : pred_index) {
    (void)rec;
    if (gold_index.find(id) == gold_index.end()) {
      throw navprompt::Error("no gold record for instruction '" + id + "'");
    }
  }

  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  std::size_t hit_total = 0, pred_total = 0, gold_total = 0;
  for (const auto& [id, gold_rec] : gold_index) {
    const auto& pred_rec = *pred_index.at(id);
    const navprompt::PhraseMatchReport rep =
        navprompt::phrase_set_prf(pred_rec.phrases, gold_rec->phrases, scorer, threshold);
    p_sum += rep.precision;
    r_sum += rep.recall;
    f_sum += rep.f1;
    hit_total += rep.hits;
    pred_total += rep.predicted;
    gold_total += rep.gold;
  }
  const double n = static_cast<double>(gold_index.size());
  const double micro_p =
      pred_total > 0 ? static_cast<double>(hit_total) / static_cast<double>(pred_total)
                     : (gold_total == 0 ? 1.0 : 0.0);
  const double micro_r =
      gold_total > 0 ? static_cast<double>(hit_total) / static_cast<double>(gold_total)
                     : (pred_total == 0 ? 1.0 : 0.0);
  const double micro_f =
      micro_p + micro_r > 0.0 ? 2.0 * micro_p * micro_r / (micro_p + micro_r) : 0.0;

  // Headline P/R/F1 pool hit counts over the whole corpus; per-instruction
  // means are reported alongside.
  const json summary = {{"command", "eval-phrases"},
                        {"scorer", args.scorer},
                        {"threshold", threshold},
                        {"instructions", gold_index.size()},
                        {"precision", micro_p},
                        {"recall", micro_r},
                        {"f1", micro_f},
                        {"macro_precision", p_sum / n},
                        {"macro_recall", r_sum / n},
                        {"macro_f1", f_sum / n},
                        {"hits", hit_total},
                        {"predicted", pred_total},
                        {"gold", gold_total}};
  std::ostringstream human;
  human << "instructions: " << gold_index.size() << "\n"
        << "precision: " << micro_p << "\n"
        << "recall: " << micro_r << "\n"
        << "f1: " << micro_f << "\n";
  emit(summary, human.str(), common.summary);
}

// ---------------------------------------------------------------- eval-viewpoints

struct EvalViewpointsArgs {
  std::string predicted;
  std::string gold;
  std::string graph;
};

void run_eval_viewpoints(const EvalViewpointsArgs& args, const CommonOpts& common) {
  const navprompt::NavGraph graph = navprompt::load_graph(args.graph);
  const auto predicted = navprompt::read_jsonl<navprompt::GoldRecord>(args.predicted);
  const auto gold = navprompt::read_jsonl<navprompt::GoldRecord>(args.gold);
  if (gold.empty()) throw navprompt::EmptyResultSet("no gold records to evaluate against");

  const auto pred_index = index_by_id(predicted);
  const auto gold_index = index_by_id(gold);
  std::size_t matching = 0, neighboring = 0, pairs = 0;
  for (const auto& [id, gold_rec] : gold_index) {
    const auto it = pred_index.find(id);
    if (it == pred_index.end()) {
      throw navprompt::Error("no predicted record for instruction '" + id + "'");
    }
    const navprompt::ViewpointReport rep = navprompt::viewpoint_accuracy(
        it->second->viewpoints, gold_rec->viewpoints, graph);
    const double np = static_cast<double>(rep.pairs);
    matching += static_cast<std::size_t>(rep.matching * np + 0.5);
    neighboring += static_cast<std::size_t>(rep.neighboring * np + 0.5);
    pairs += rep.pairs;
  }
  const double n = pairs > 0 ? static_cast<double>(pairs) : 1.0;
  const json summary = {{"command", "eval-viewpoints"},
                        {"instructions", gold_index.size()},
                        {"pairs", pairs},
                        {"matching", static_cast<double>(matching) / n},
                        {"neighboring", static_cast<double>(neighboring) / n}};
  std::ostringstream human;
  human << "pairs: " << pairs << "\n"
        << "matching: " << (static_cast<double>(matching) / n) << "\n"
        << "neighboring: " << (static_cast<double>(neighboring) / n) << "\n";
  emit(summary, human.str(), common.summary);
}

// ---------------------------------------------------------------- pre-explore

struct PreExploreArgs {
  std::string instructions;
  std::string candidates;
  std::string graph;
  std::string pseudo_paths;
  std::string out;
};

void run_pre_explore(const PreExploreArgs& args, const CommonOpts& common) {
  const navprompt::ToolConfig cfg = resolve_config(common);
  const navprompt::NavGraph graph = navprompt::load_graph(args.graph);
  auto instructions = navprompt::read_jsonl<navprompt::InstructionRecord>(args.instructions);
  navprompt::FixtureDetector detector(
      navprompt::read_jsonl<navprompt::CandidateSetRecord>(args.candidates));
  const auto pseudo = navprompt::read_jsonl<navprompt::TrajectoryRecord>(args.pseudo_paths);
  const auto pseudo_index = index_by_id(pseudo);

  std::stable_sort(instructions.begin(), instructions.end(),
                   [](const auto& a, const auto& b) { return a.instr.id < b.instr.id; });

  std::vector<navprompt::MmiRecord> records;
  std::vector<navprompt::MissRecord> misses;
  for (const auto& rec : instructions) {
    const auto it = pseudo_index.find(rec.instr.id);
    if (it == pseudo_index.end()) {
      throw navprompt::Error("no pseudo path for instruction '" + rec.instr.id + "'");
    }
    const navprompt::Trajectory pseudo_path{it->second->nodes};
    navprompt::PreExploreOutput out =
        navprompt::pre_explore_build(rec.instr, pseudo_path, graph, detector, cfg.pipeline);
    records.push_back(std::move(out.record));
    for (auto& m : out.misses) misses.push_back(std::move(m));
  }

  fs::create_directories(args.out);
  const fs::path dataset_path = fs::path(args.out) / "pre_explore.jsonl";
  navprompt::write_jsonl(dataset_path, records);
  navprompt::write_jsonl(fs::path(args.out) / "misses.jsonl", misses);

  const json summary = {{"command", "pre-explore"},
                        {"instructions", instructions.size()},
                        {"records", records.size()},
                        {"misses", misses.size()},
                        {"dataset", dataset_path.string()}};
  emit(summary,
       "wrote " + std::to_string(records.size()) + " pre-explore records to " +
           dataset_path.string() + " (" + std::to_string(misses.size()) + " misses)\n",
       common.summary);
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string instructions;
  std::string dataset;
};

void run_stats(const StatsArgs& args, const CommonOpts& common) {
  json summary = {{"command", "stats"}};
  std::ostringstream human;

  if (!args.instructions.empty()) {
    const auto records =
        navprompt::read_jsonl<navprompt::InstructionRecord>(args.instructions);
    std::size_t phrase_total = 0, phrase_max = 0, token_total = 0;
    for (const auto& r : records) {
      phrase_total += r.instr.phrases.size();
      phrase_max = std::max(phrase_max, r.instr.phrases.size());
      token_total += r.instr.tokens.size();
    }
    const double n = records.empty() ? 1.0 : static_cast<double>(records.size());
    summary["instructions"] = {
        {"count", records.size()},
        {"landmarks_mean", static_cast<double>(phrase_total) / n},
        {"landmarks_max", phrase_max},
        {"tokens_mean", static_cast<double>(token_total) / n}};
    human << "instructions: " << records.size() << "\n"
          << "landmarks per instruction: mean "
          << (static_cast<double>(phrase_total) / n) << ", max " << phrase_max << "\n"
          << "tokens per instruction: mean "
          << (static_cast<double>(token_total) / n) << "\n";
  }

  if (!args.dataset.empty()) {
    const auto records = navprompt::read_jsonl<navprompt::MmiRecord>(args.dataset);
    std::size_t prompt_total = 0, prompt_max = 0;
    std::map<std::string, std::size_t> per_setting;
    for (const auto& r : records) {
      prompt_total += r.mmi.prompts.size();
      prompt_max = std::max(prompt_max, r.mmi.prompts.size());
      ++per_setting[navprompt::to_string(r.mmi.setting)];
    }
    const double n = records.empty() ? 1.0 : static_cast<double>(records.size());
    summary["dataset"] = {{"count", records.size()},
                          {"prompts_mean", static_cast<double>(prompt_total) / n},
                          {"prompts_max", prompt_max},
                          {"settings", per_setting}};
    human << "dataset records: " << records.size() << "\n"
          << "prompts per record: mean " << (static_cast<double>(prompt_total) / n)
          << ", max " << prompt_max << "\n";
    for (const auto& [setting, count] : per_setting) {
      human << "  " << setting << ": " << count << "\n";
    }
  }

  if (args.instructions.empty() && args.dataset.empty()) {
    throw navprompt::Error("stats needs --instructions and/or --dataset");
  }
  emit(summary, human.str(), common.summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-modal navigation instruction toolkit"};
  app.require_subcommand(1);

  CommonOpts align_common, build_common, nav_common, phr_common, vp_common,
      pre_common, stats_common;

  AlignArgs align_args;
  CLI::App* align = app.add_subcommand(
      "align", "Select prompt images for one setting from stored candidates");
  align->add_option("--instructions", align_args.instructions, "instructions.jsonl")
      ->required();
  align->add_option("--candidates", align_args.candidates, "candidates.jsonl");
  align->add_option("--setting", align_args.setting,
                    "aligned | related | terminal | text_only");
  align->add_option("--out", align_args.out, "Output directory")->required();
  add_common_flags(align, align_common, true);

  BuildArgs build_args;
  CLI::App* build = app.add_subcommand(
      "build", "Build all three prompt settings (plus optional augmented copies)");
  build->add_option("--instructions", build_args.instructions, "instructions.jsonl")
      ->required();
  build->add_option("--candidates", build_args.candidates, "candidates.jsonl");
  build->add_option("--captions", build_args.captions,
                    "captions.jsonl for terminal-record captions");
  build->add_option("--augments", build_args.augments,
                    "augments.jsonl with per-image variant lists");
  build->add_option("--out", build_args.out, "Output directory")->required();
  build->add_flag("--caption-terminal", build_args.caption_terminal,
                  "Ask the remote captioner for terminal-record captions");
  add_common_flags(build, build_common, true);

  EvalNavArgs nav_args;
  CLI::App* eval_nav = app.add_subcommand(
      "eval-nav", "Score predicted trajectories with SR / SPL / nDTW / GP");
  eval_nav->add_option("--graph", nav_args.graph, "graph.json")->required();
  eval_nav->add_option("--trajectories", nav_args.trajectories, "trajectories.jsonl")
      ->required();
  eval_nav->add_option("--threshold", nav_args.threshold, "Success radius in meters");
  eval_nav->add_option("--out", nav_args.out, "Per-episode results file (JSONL)");
  add_common_flags(eval_nav, nav_common, false);

  EvalPhrasesArgs phr_args;
  CLI::App* eval_phrases = app.add_subcommand(
      "eval-phrases", "Compare predicted landmark phrases against gold phrases");
  eval_phrases->add_option("--predicted", phr_args.predicted, "predicted phrases JSONL")
      ->required();
  eval_phrases->add_option("--gold", phr_args.gold, "gold phrases JSONL")->required();
  eval_phrases->add_option("--scorer", phr_args.scorer, "fuzzy | rouge");
  eval_phrases->add_option("--threshold", phr_args.threshold, "Match threshold");
  add_common_flags(eval_phrases, phr_common, false);

  EvalViewpointsArgs vp_args;
  CLI::App* eval_viewpoints = app.add_subcommand(
      "eval-viewpoints", "Compare selected viewpoints against gold viewpoints");
  eval_viewpoints->add_option("--predicted", vp_args.predicted, "predicted viewpoints JSONL")
      ->required();
  eval_viewpoints->add_option("--gold", vp_args.gold, "gold viewpoints JSONL")->required();
  eval_viewpoints->add_option("--graph", vp_args.graph, "graph.json")->required();
  add_common_flags(eval_viewpoints, vp_common, false);

  PreExploreArgs pre_args;
  CLI::App* pre_explore = app.add_subcommand(
      "pre-explore", "Build aligned records restricted to pseudo-path surroundings");
  pre_explore->add_option("--instructions", pre_args.instructions, "instructions.jsonl")
      ->required();
  pre_explore->add_option("--candidates", pre_args.candidates, "candidates.jsonl")
      ->required();
  pre_explore->add_option("--graph", pre_args.graph, "graph.json")->required();
  pre_explore->add_option("--pseudo-paths", pre_args.pseudo_paths,
                          "pseudo paths as trajectories.jsonl")
      ->required();
  pre_explore->add_option("--out", pre_args.out, "Output directory")->required();
  add_common_flags(pre_explore, pre_common, false);

  StatsArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("--instructions", stats_args.instructions, "instructions.jsonl");
  stats->add_option("--dataset", stats_args.dataset, "built dataset JSONL");
  add_common_flags(stats, stats_common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << "\n";
    return 1;
  }

  try {
    if (align->parsed()) run_align(align_args, align_common);
    else if (build->parsed()) run_build(build_args, build_common);
    else if (eval_nav->parsed()) run_eval_nav(nav_args, nav_common);
    else if (eval_phrases->parsed()) run_eval_phrases(phr_args, phr_common);
    else if (eval_viewpoints->parsed()) run_eval_viewpoints(vp_args, vp_common);
    else if (pre_explore->parsed()) run_pre_explore(pre_args, pre_common);
    else if (stats->parsed()) run_stats(stats_args, stats_common);
  } catch (const navprompt::ClientUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const navprompt::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const navprompt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
