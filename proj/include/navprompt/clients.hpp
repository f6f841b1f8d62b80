#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "navprompt/alignment.hpp"
#include "navprompt/errors.hpp"
#include "navprompt/instruction.hpp"
#include "navprompt/records.hpp"

namespace navprompt {

/// Landmark-phrase extraction seam. Implementations wrap whatever produces
/// phrase spans for an instruction; the pipeline validates the output.
class ExtractorClient {
 public:
  virtual ~ExtractorClient() = default;
  virtual std::vector<PhraseSpan> extract(const std::string& instruction_id,
                                          const std::string& text) = 0;
};

/// One detection request: a phrase plus the ordered list of nodes whose
/// images should be scanned. Returned candidates must index that list
/// through order_key.path_position.
struct DetectionQuery {
  std::string instruction_id;
  int phrase_index = 0;
  std::string phrase_text;
  std::vector<std::string> nodes;
};

class DetectorClient {
 public:
  virtual ~DetectorClient() = default;
  virtual std::vector<Candidate> detect(const DetectionQuery& query) = 0;
};

class CaptionerClient {
 public:
  virtual ~CaptionerClient() = default;
  virtual std::optional<std::string> caption(const std::string& image_ref) = 0;
};

/// Pre-generated image variants per original prompt image.
class AugmentStore {
 public:
  static AugmentStore from_records(const std::vector<AugmentRecord>& records) {
    AugmentStore store;
    for (const AugmentRecord& r : records) {
      if (!store.variants_.emplace(r.image_ref, r.variants).second) {
        throw Error("duplicate augment entry for '" + r.image_ref + "'");
      }
    }
    return store;
  }

  const std::vector<std::string>* variants_for(const std::string& image_ref) const {
    const auto it = variants_.find(image_ref);
    if (it == variants_.end() || it->second.empty()) return nullptr;
    return &it->second;
  }

  bool empty() const { return variants_.empty(); }
  std::size_t size() const { return variants_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> variants_;
};

// --- file-backed fixtures ---

/// Extractor backed by an instructions file: returns the stored phrase spans
/// for the requested id, or none when the id is unknown.
class FixtureExtractor : public ExtractorClient {
 public:
  explicit FixtureExtractor(const std::vector<InstructionRecord>& records) {
    for (const InstructionRecord& r : records) phrases_[r.instr.id] = r.instr.phrases;
  }

  std::vector<PhraseSpan> extract(const std::string& instruction_id,
                                  const std::string&) override {
    const auto it = phrases_.find(instruction_id);
    return it == phrases_.end() ? std::vector<PhraseSpan>{} : it->second;
  }

 private:
  std::map<std::string, std::vector<PhraseSpan>> phrases_;
};

/// Detector backed by a candidates file, keyed by (instruction id, phrase
/// index). Candidates that name their source node are remapped onto the
/// queried node list and dropped when their node is not in it; candidates
/// without a node id are taken as positioned for the queried list already.
class FixtureDetector : public DetectorClient {
 public:
  explicit FixtureDetector(const std::vector<CandidateSetRecord>& records) {
    for (const CandidateSetRecord& r : records) {
      const Key key{r.instruction_id, r.set.phrase_index};
      if (!table_.emplace(key, r.set.candidates).second) {
        throw Error("duplicate candidate record for instruction '" +
                    r.instruction_id + "' phrase " +
                    std::to_string(r.set.phrase_index));
      }
    }
  }

  std::vector<Candidate> detect(const DetectionQuery& query) override {
    const auto it = table_.find(Key{query.instruction_id, query.phrase_index});
    if (it == table_.end()) return {};
    std::vector<Candidate> out;
    for (Candidate c : it->second) {
      if (!c.node_id.empty()) {
        const auto pos = std::find(query.nodes.begin(), query.nodes.end(), c.node_id);
        if (pos == query.nodes.end()) continue;
        c.order_key.path_position = static_cast<int>(pos - query.nodes.begin());
      } else if (c.order_key.path_position >= static_cast<int>(query.nodes.size())) {
        continue;
      }
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  using Key = std::pair<std::string, int>;
  std::map<Key, std::vector<Candidate>> table_;
};

class FixtureCaptioner : public CaptionerClient {
 public:
  explicit FixtureCaptioner(const std::vector<CaptionRecord>& records) {
    for (const CaptionRecord& r : records) captions_[r.image_ref] = r.caption;
  }

  std::optional<std::string> caption(const std::string& image_ref) override {
    const auto it = captions_.find(image_ref);
    if (it == captions_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<std::string, std::string> captions_;
};

// --- HTTP-backed clients ---

struct RemoteConfig {
  std::string base_url;  // e.g. http://localhost:8080
  int timeout_ms = 5000;
  int retries = 2;  // attempts beyond the first
};

namespace detail {

/// Serialized POST with retries. cpp-httplib clients are not safe for
/// concurrent calls, so each remote client owns a mutex.
class HttpPoster {
 public:
  explicit HttpPoster(const RemoteConfig& cfg) : cfg_(cfg), client_(cfg.base_url) {
    client_.set_connection_timeout(0, cfg.timeout_ms * 1000);
    client_.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
    client_.set_write_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
  }

  json post(const std::string& path, const json& body) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
      auto res = client_.Post(path, body.dump(), "application/json");
      if (!res) {
        last_error = "transport error (" + httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP status " + std::to_string(res->status);
        continue;
      }
      try {
        return json::parse(res->body);
      } catch (const json::exception& e) {
        last_error = std::string("malformed response body: ") + e.what();
      }
    }
    throw ClientUnavailable("POST " + cfg_.base_url + path + " failed: " + last_error);
  }

 private:
  RemoteConfig cfg_;
  httplib::Client client_;
  std::mutex mutex_;
};

}  // namespace detail

/// POST /extract {"id", "text"} -> {"phrases": [{"text", "start", "end"}]}
class HttpExtractor : public ExtractorClient {
 public:
  explicit HttpExtractor(const RemoteConfig& cfg) : poster_(cfg) {}

  std::vector<PhraseSpan> extract(const std::string& instruction_id,
                                  const std::string& text) override {
    const json res = poster_.post("/extract", {{"id", instruction_id}, {"text", text}});
    std::vector<PhraseSpan> phrases;
    try {
      for (const json& pj : detail::require_field(res, "phrases")) {
        phrases.push_back({detail::require_field(pj, "text").get<std::string>(),
                           detail::require_field(pj, "start").get<int>(),
                           detail::require_field(pj, "end").get<int>()});
      }
    } catch (const Error& e) {
      throw ClientUnavailable(std::string("bad /extract response: ") + e.what());
    } catch (const json::exception& e) {
      throw ClientUnavailable(std::string("bad /extract response: ") + e.what());
    }
    return phrases;
  }

 private:
  detail::HttpPoster poster_;
};

/// POST /detect {"instruction_id", "phrase_index", "phrase_text", "nodes"}
/// -> {"candidates": [candidate records]}
class HttpDetector : public DetectorClient {
 public:
  explicit HttpDetector(const RemoteConfig& cfg) : poster_(cfg) {}

  std::vector<Candidate> detect(const DetectionQuery& query) override {
    const json res = poster_.post("/detect", {{"instruction_id", query.instruction_id},
                                              {"phrase_index", query.phrase_index},
                                              {"phrase_text", query.phrase_text},
                                              {"nodes", query.nodes}});
    std::vector<Candidate> out;
    try {
      for (const json& cj : detail::require_field(res, "candidates")) {
        Candidate c;
        c.detection_score = detail::require_field(cj, "score").get<double>();
        c.image_ref = detail::require_field(cj, "image_ref").get<std::string>();
        c.bbox = detail::bbox_from_json(detail::require_field(cj, "bbox"));
        c.image_width = detail::require_field(cj, "image_width").get<int>();
        c.image_height = detail::require_field(cj, "image_height").get<int>();
        c.order_key.path_position = detail::require_field(cj, "path_position").get<int>();
        c.order_key.view_index = detail::require_field(cj, "view_index").get<int>();
        c.node_id = cj.value("node_id", "");
        out.push_back(std::move(c));
      }
    } catch (const Error& e) {
      throw ClientUnavailable(std::string("bad /detect response: ") + e.what());
    } catch (const json::exception& e) {
      throw ClientUnavailable(std::string("bad /detect response: ") + e.what());
    }
    return out;
  }

 private:
  detail::HttpPoster poster_;
};

/// POST /caption {"image_ref"} -> {"caption": "..."}
class HttpCaptioner : public CaptionerClient {
 public:
  explicit HttpCaptioner(const RemoteConfig& cfg) : poster_(cfg) {}

  std::optional<std::string> caption(const std::string& image_ref) override {
    const json res = poster_.post("/caption", {{"image_ref", image_ref}});
    if (!res.contains("caption") || res["caption"].is_null()) return std::nullopt;
    try {
      return res["caption"].get<std::string>();
    } catch (const json::exception& e) {
      throw ClientUnavailable(std::string("bad /caption response: ") + e.what());
    }
  }

 private:
  detail::HttpPoster poster_;
};

}  // namespace navprompt
