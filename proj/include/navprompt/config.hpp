#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include "navprompt/clients.hpp"
#include "navprompt/errors.hpp"
#include "navprompt/pipeline.hpp"

namespace navprompt {

/// Everything the command-line tool can configure from a file. An empty
/// server_url means file-backed fixture clients.
struct ToolConfig {
  PipelineConfig pipeline;
  RemoteConfig remote;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& value, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, "expected a number, got '" + value + "'");
  }
}

inline long long parse_int(const std::string& value, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, "expected an integer, got '" + value + "'");
  }
}

inline std::uint64_t parse_uint(const std::string& value, std::size_t line_no) {
  const long long v = parse_int(value, line_no);
  if (v < 0) throw ParseError(line_no, "expected a non-negative integer, got '" + value + "'");
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

/// Applies one key=value setting. Line numbers only affect error messages.
inline void apply_config_entry(ToolConfig& cfg, const std::string& key,
                               const std::string& value, std::size_t line_no) {
  if (key == "beta0") {
    cfg.pipeline.alignment.beta0 = detail::parse_double(value, line_no);
  } else if (key == "beta1") {
    cfg.pipeline.alignment.beta1 = detail::parse_double(value, line_no);
  } else if (key == "beam_width") {
    cfg.pipeline.alignment.beam_width =
        static_cast<int>(detail::parse_int(value, line_no));
  } else if (key == "beam_width_cap") {
    cfg.pipeline.alignment.beam_width_cap =
        static_cast<int>(detail::parse_int(value, line_no));
  } else if (key == "gamma") {
    cfg.pipeline.gamma = detail::parse_double(value, line_no);
  } else if (key == "seed") {
    cfg.pipeline.seed = detail::parse_uint(value, line_no);
  } else if (key == "oracle_bound") {
    cfg.pipeline.oracle_bound = detail::parse_uint(value, line_no);
  } else if (key == "server_url") {
    cfg.remote.base_url = value;
  } else if (key == "timeout_ms") {
    cfg.remote.timeout_ms = static_cast<int>(detail::parse_int(value, line_no));
  } else if (key == "retries") {
    cfg.remote.retries = static_cast<int>(detail::parse_int(value, line_no));
  } else {
    throw ParseError(line_no, "unknown config key '" + key + "'");
  }
}

/// Simple key=value file; blank lines and '#' comments are ignored. Settings
/// land on top of `base`, so flag handling can overlay parsed flags afterwards
/// to get the flags > file > defaults precedence.
inline ToolConfig load_config_file(const std::string& path, ToolConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected key=value, got '" + stripped + "'");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty config key");
    apply_config_entry(base, key, value, line_no);
  }
  validate_pipeline_config(base.pipeline);
  return base;
}

}  // namespace navprompt
