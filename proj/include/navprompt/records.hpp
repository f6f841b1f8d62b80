#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "navprompt/alignment.hpp"
#include "navprompt/errors.hpp"
#include "navprompt/instruction.hpp"
#include "navprompt/nav_graph.hpp"

namespace navprompt {

using json = nlohmann::json;

// Line-delimited record types. Every record keeps unrecognized top-level
// fields in `extra` and writes them back out, so files survive schema
// additions from newer producers.

struct InstructionRecord {
  TextInstruction instr;
  json extra = json::object();

  friend bool operator==(const InstructionRecord&, const InstructionRecord&) = default;
};

struct CandidateSetRecord {
  std::string instruction_id;
  CandidateSet set;
  json extra = json::object();

  friend bool operator==(const CandidateSetRecord& a, const CandidateSetRecord& b) {
    return a.instruction_id == b.instruction_id &&
           a.set.phrase_index == b.set.phrase_index &&
           a.set.candidates == b.set.candidates && a.extra == b.extra;
  }
};

struct ScoreBundle {
  double s_seq = 0.0;
  double s_det_avg = 0.0;
  double s_box_avg = 0.0;
  double s_all = 0.0;

  friend bool operator==(const ScoreBundle&, const ScoreBundle&) = default;
};

/// One line of a built dataset: a multi-modal instruction plus the scores of
/// the selection that produced it and an optional prompt caption.
struct MmiRecord {
  MultiModalInstruction mmi;
  std::optional<ScoreBundle> scores;
  std::optional<std::string> caption;
  json extra = json::object();

  const std::string& id() const { return mmi.base.id; }

  friend bool operator==(const MmiRecord&, const MmiRecord&) = default;
};

struct TrajectoryRecord {
  std::string instruction_id;
  std::vector<std::string> nodes;
  std::string start;
  std::string goal;
  std::optional<std::vector<std::string>> reference;
  json extra = json::object();

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

struct GoldRecord {
  std::string instruction_id;
  std::vector<std::string> phrases;
  std::vector<std::string> viewpoints;
  json extra = json::object();

  friend bool operator==(const GoldRecord&, const GoldRecord&) = default;
};

struct AugmentRecord {
  std::string image_ref;
  std::vector<std::string> variants;
  json extra = json::object();

  friend bool operator==(const AugmentRecord&, const AugmentRecord&) = default;
};

struct CaptionRecord {
  std::string image_ref;
  std::string caption;
  json extra = json::object();

  friend bool operator==(const CaptionRecord&, const CaptionRecord&) = default;
};

struct MissRecord {
  std::string instruction_id;
  int phrase_index = -1;  // -1 marks a whole-instruction fallback
  std::string phrase_text;
  std::string reason;
  json extra = json::object();

  friend bool operator==(const MissRecord&, const MissRecord&) = default;
};

namespace detail {

inline const json& require_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing field '") + key + "'");
  return *it;
}

inline json take_extras(json j, std::initializer_list<const char*> known) {
  for (const char* key : known) j.erase(key);
  return j;
}

inline BBox bbox_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("bbox must be [x, y, w, h]");
  return BBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
              j[3].get<double>()};
}

inline json bbox_to_json(const BBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

}  // namespace detail

// --- instructions.jsonl ---

inline void from_record_json(const json& j, InstructionRecord& r) {
  r.instr.id = detail::require_field(j, "id").get<std::string>();
  r.instr.tokens = detail::require_field(j, "tokens").get<std::vector<std::string>>();
  r.instr.phrases.clear();
  for (const json& pj : detail::require_field(j, "phrases")) {
    PhraseSpan span;
    span.text = detail::require_field(pj, "text").get<std::string>();
    span.start = detail::require_field(pj, "start").get<int>();
    span.end = detail::require_field(pj, "end").get<int>();
    r.instr.phrases.push_back(std::move(span));
  }
  r.instr.path_node_ids = detail::require_field(j, "path").get<std::vector<std::string>>();
  r.instr.language = j.value("language", "en");
  r.instr = validate_instruction(std::move(r.instr));
  r.extra = detail::take_extras(j, {"id", "tokens", "phrases", "path", "language"});
}

inline json to_record_json(const InstructionRecord& r) {
  json j = r.extra;
  j["id"] = r.instr.id;
  j["tokens"] = r.instr.tokens;
  json phrases = json::array();
  for (const PhraseSpan& p : r.instr.phrases) {
    phrases.push_back({{"text", p.text}, {"start", p.start}, {"end", p.end}});
  }
  j["phrases"] = std::move(phrases);
  j["path"] = r.instr.path_node_ids;
  j["language"] = r.instr.language;
  return j;
}

// --- candidates.jsonl ---

inline void from_record_json(const json& j, CandidateSetRecord& r) {
  r.instruction_id = detail::require_field(j, "instruction_id").get<std::string>();
  r.set.phrase_index = detail::require_field(j, "phrase_index").get<int>();
  r.set.candidates.clear();
  for (const json& cj : detail::require_field(j, "candidates")) {
    Candidate c;
    c.detection_score = detail::require_field(cj, "score").get<double>();
    c.image_ref = detail::require_field(cj, "image_ref").get<std::string>();
    c.bbox = detail::bbox_from_json(detail::require_field(cj, "bbox"));
    c.image_width = detail::require_field(cj, "image_width").get<int>();
    c.image_height = detail::require_field(cj, "image_height").get<int>();
    c.order_key.path_position = detail::require_field(cj, "path_position").get<int>();
    c.order_key.view_index = detail::require_field(cj, "view_index").get<int>();
    c.node_id = cj.value("node_id", "");
    validate_candidate(c);
    r.set.candidates.push_back(std::move(c));
  }
  normalize_candidate_set(r.set);
  r.extra = detail::take_extras(j, {"instruction_id", "phrase_index", "candidates"});
}

inline json to_record_json(const CandidateSetRecord& r) {
  json j = r.extra;
  j["instruction_id"] = r.instruction_id;
  j["phrase_index"] = r.set.phrase_index;
  json cands = json::array();
  for (const Candidate& c : r.set.candidates) {
    json cj = {{"score", c.detection_score},
               {"image_ref", c.image_ref},
               {"bbox", detail::bbox_to_json(c.bbox)},
               {"image_width", c.image_width},
               {"image_height", c.image_height},
               {"path_position", c.order_key.path_position},
               {"view_index", c.order_key.view_index}};
    if (!c.node_id.empty()) cj["node_id"] = c.node_id;
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  return j;
}

// --- built datasets (aligned/related/terminal/pre-explore files) ---

inline void from_record_json(const json& j, MmiRecord& r) {
  InstructionRecord base;
  from_record_json(j, base);
  r.mmi.base = std::move(base.instr);

  const std::string setting_name = detail::require_field(j, "setting").get<std::string>();
  const auto setting = parse_setting(setting_name);
  if (!setting) throw Error("unknown setting '" + setting_name + "'");
  r.mmi.setting = *setting;

  r.mmi.prompts.clear();
  for (const json& pj : detail::require_field(j, "prompts")) {
    VisualPrompt p;
    p.phrase_index = detail::require_field(pj, "phrase_index").get<int>();
    p.image_ref = detail::require_field(pj, "image_ref").get<std::string>();
    p.bbox = detail::bbox_from_json(detail::require_field(pj, "bbox"));
    p.image_width = detail::require_field(pj, "image_width").get<int>();
    p.image_height = detail::require_field(pj, "image_height").get<int>();
    if (pj.contains("path_position")) {
      PromptSource src;
      src.path_position = pj["path_position"].get<int>();
      src.view_index = pj.value("view_index", 0);
      src.node_id = pj.value("node_id", "");
      p.source = std::move(src);
    }
    r.mmi.prompts.push_back(std::move(p));
  }
  validate_multimodal(r.mmi);

  r.scores.reset();
  if (j.contains("scores")) {
    const json& sj = j["scores"];
    ScoreBundle s;
    s.s_seq = detail::require_field(sj, "s_seq").get<double>();
    s.s_det_avg = detail::require_field(sj, "s_det_avg").get<double>();
    s.s_box_avg = detail::require_field(sj, "s_box_avg").get<double>();
    s.s_all = detail::require_field(sj, "s_all").get<double>();
    r.scores = s;
  }
  r.caption.reset();
  if (j.contains("caption")) r.caption = j["caption"].get<std::string>();

  r.extra = detail::take_extras(j, {"id", "tokens", "phrases", "path", "language",
                                    "setting", "prompts", "scores", "caption"});
}

inline json to_record_json(const MmiRecord& r) {
  json j = to_record_json(InstructionRecord{r.mmi.base, r.extra});
  j["setting"] = to_string(r.mmi.setting);
  json prompts = json::array();
  for (const VisualPrompt& p : r.mmi.prompts) {
    json pj = {{"phrase_index", p.phrase_index},
               {"image_ref", p.image_ref},
               {"bbox", detail::bbox_to_json(p.bbox)},
               {"image_width", p.image_width},
               {"image_height", p.image_height}};
    if (p.source) {
      pj["path_position"] = p.source->path_position;
      pj["view_index"] = p.source->view_index;
      if (!p.source->node_id.empty()) pj["node_id"] = p.source->node_id;
    }
    prompts.push_back(std::move(pj));
  }
  j["prompts"] = std::move(prompts);
  if (r.scores) {
    j["scores"] = {{"s_seq", r.scores->s_seq},
                   {"s_det_avg", r.scores->s_det_avg},
                   {"s_box_avg", r.scores->s_box_avg},
                   {"s_all", r.scores->s_all}};
  }
  if (r.caption) j["caption"] = *r.caption;
  return j;
}

// --- trajectories.jsonl ---

inline void from_record_json(const json& j, TrajectoryRecord& r) {
  r.instruction_id = detail::require_field(j, "instruction_id").get<std::string>();
  r.nodes = detail::require_field(j, "nodes").get<std::vector<std::string>>();
  r.start = detail::require_field(j, "start").get<std::string>();
  r.goal = detail::require_field(j, "goal").get<std::string>();
  r.reference.reset();
  if (j.contains("reference")) {
    r.reference = j["reference"].get<std::vector<std::string>>();
  }
  r.extra = detail::take_extras(j, {"instruction_id", "nodes", "start", "goal",
                                    "reference"});
}

inline json to_record_json(const TrajectoryRecord& r) {
  json j = r.extra;
  j["instruction_id"] = r.instruction_id;
  j["nodes"] = r.nodes;
  j["start"] = r.start;
  j["goal"] = r.goal;
  if (r.reference) j["reference"] = *r.reference;
  return j;
}

// --- gold.jsonl ---

inline void from_record_json(const json& j, GoldRecord& r) {
  r.instruction_id = detail::require_field(j, "instruction_id").get<std::string>();
  r.phrases = detail::require_field(j, "phrases").get<std::vector<std::string>>();
  r.viewpoints = detail::require_field(j, "viewpoints").get<std::vector<std::string>>();
  r.extra = detail::take_extras(j, {"instruction_id", "phrases", "viewpoints"});
}

inline json to_record_json(const GoldRecord& r) {
  json j = r.extra;
  j["instruction_id"] = r.instruction_id;
  j["phrases"] = r.phrases;
  j["viewpoints"] = r.viewpoints;
  return j;
}

// --- augments.jsonl ---

inline void from_record_json(const json& j, AugmentRecord& r) {
  r.image_ref = detail::require_field(j, "image_ref").get<std::string>();
  r.variants = detail::require_field(j, "variants").get<std::vector<std::string>>();
  for (const std::string& v : r.variants) {
    if (v == r.image_ref) {
      throw Error("augment variant equals the original ref '" + v + "'");
    }
  }
  r.extra = detail::take_extras(j, {"image_ref", "variants"});
}

inline json to_record_json(const AugmentRecord& r) {
  json j = r.extra;
  j["image_ref"] = r.image_ref;
  j["variants"] = r.variants;
  return j;
}

// --- captions.jsonl ---

inline void from_record_json(const json& j, CaptionRecord& r) {
  r.image_ref = detail::require_field(j, "image_ref").get<std::string>();
  r.caption = detail::require_field(j, "caption").get<std::string>();
  r.extra = detail::take_extras(j, {"image_ref", "caption"});
}

inline json to_record_json(const CaptionRecord& r) {
  json j = r.extra;
  j["image_ref"] = r.image_ref;
  j["caption"] = r.caption;
  return j;
}

// --- misses.jsonl ---

inline void from_record_json(const json& j, MissRecord& r) {
  r.instruction_id = detail::require_field(j, "instruction_id").get<std::string>();
  r.phrase_index = detail::require_field(j, "phrase_index").get<int>();
  r.phrase_text = j.value("phrase_text", "");
  r.reason = detail::require_field(j, "reason").get<std::string>();
  r.extra = detail::take_extras(j, {"instruction_id", "phrase_index", "phrase_text",
                                    "reason"});
}

inline json to_record_json(const MissRecord& r) {
  json j = r.extra;
  j["instruction_id"] = r.instruction_id;
  j["phrase_index"] = r.phrase_index;
  if (!r.phrase_text.empty()) j["phrase_text"] = r.phrase_text;
  j["reason"] = r.reason;
  return j;
}

// --- line-delimited file access ---

/// Reads a whole JSONL file. Malformed or invalid lines raise ParseError with
/// the 1-based line number; blank lines are skipped.
template <typename Record>
std::vector<Record> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw Error("record is not a JSON object");
      Record r;
      from_record_json(j, r);
      records.push_back(std::move(r));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return records;
}

template <typename Record>
void write_jsonl(const std::filesystem::path& path, const std::vector<Record>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const Record& r : records) {
    out << to_record_json(r).dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

// --- graph.json ---

inline NavGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(1, e.what());
  }
  NavGraph graph;
  try {
    for (const json& nj : detail::require_field(j, "nodes")) {
      const json& xyz = detail::require_field(nj, "xyz");
      if (!xyz.is_array() || xyz.size() != 3) throw Error("xyz must be [x, y, z]");
      graph.add_node(detail::require_field(nj, "id").get<std::string>(),
                     Vec3{xyz[0].get<double>(), xyz[1].get<double>(),
                          xyz[2].get<double>()});
    }
    for (const json& ej : detail::require_field(j, "edges")) {
      if (!ej.is_array() || ej.size() != 2) throw Error("edge must be [a, b]");
      graph.add_edge(ej[0].get<std::string>(), ej[1].get<std::string>());
    }
  } catch (const Error& e) {
    throw ParseError(1, e.what());
  } catch (const json::exception& e) {
    throw ParseError(1, e.what());
  }
  graph.finalize();
  return graph;
}

inline void save_graph(const std::filesystem::path& path, const NavGraph& graph) {
  json nodes = json::array();
  for (const std::string& id : graph.node_ids()) {
    const Vec3& p = graph.position(id);
    nodes.push_back({{"id", id}, {"xyz", json::array({p.x, p.y, p.z})}});
  }
  json edges = json::array();
  for (const std::string& id : graph.node_ids()) {
    for (const std::string& other : graph.neighbors(id)) {
      if (id < other) edges.push_back(json::array({id, other}));
    }
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}}.dump(2)
      << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace navprompt
