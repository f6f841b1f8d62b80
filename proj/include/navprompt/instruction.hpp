#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "navprompt/errors.hpp"

namespace navprompt {

/// Axis-aligned box in pixel coordinates.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Landmark phrase span over an instruction's tokens, 1-based inclusive.
struct PhraseSpan {
  std::string text;
  int start = 0;
  int end = 0;

  friend bool operator==(const PhraseSpan&, const PhraseSpan&) = default;
};

/// Textual navigation instruction: word tokens, landmark phrase spans, and
/// the node sequence of the path it describes.
struct TextInstruction {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<PhraseSpan> phrases;
  std::vector<std::string> path_node_ids;
  std::string language = "en";

  friend bool operator==(const TextInstruction&, const TextInstruction&) = default;
};

/// Where a prompt image was harvested from, when known: position of the source
/// node in the instruction path and the frame index within that node's panorama.
struct PromptSource {
  int path_position = 0;
  int view_index = 0;
  std::string node_id;

  friend bool operator==(const PromptSource&, const PromptSource&) = default;
};

/// An image inserted next to one landmark phrase.
struct VisualPrompt {
  int phrase_index = 0;  // 0-based index into TextInstruction::phrases
  std::string image_ref;
  BBox bbox;
  int image_width = 0;
  int image_height = 0;
  std::optional<PromptSource> source;

  friend bool operator==(const VisualPrompt&, const VisualPrompt&) = default;
};

enum class PromptSetting { Aligned, Related, Terminal, TextOnly };

inline const char* to_string(PromptSetting s) {
  switch (s) {
    case PromptSetting::Aligned: return "aligned";
    case PromptSetting::Related: return "related";
    case PromptSetting::Terminal: return "terminal";
    case PromptSetting::TextOnly: return "text_only";
  }
  return "text_only";
}

inline std::optional<PromptSetting> parse_setting(const std::string& s) {
  if (s == "aligned") return PromptSetting::Aligned;
  if (s == "related") return PromptSetting::Related;
  if (s == "terminal") return PromptSetting::Terminal;
  if (s == "text_only") return PromptSetting::TextOnly;
  return std::nullopt;
}

/// Instruction with visual prompts interleaved next to their phrases.
struct MultiModalInstruction {
  TextInstruction base;
  std::vector<VisualPrompt> prompts;  // sorted by phrase_index, distinct
  PromptSetting setting = PromptSetting::TextOnly;

  friend bool operator==(const MultiModalInstruction&,
                         const MultiModalInstruction&) = default;
};

enum class TokenKind { Text, Image };

/// One slot of the combined token sequence. Text entries keep their original
/// token position as multimodal_position; an image entry shares the
/// multimodal_position of the last token of its phrase, which is what ties the
/// image to the phrase when positions are embedded a second time.
struct LayoutEntry {
  TokenKind kind = TokenKind::Text;
  int source_index = 0;  // token index for Text, prompt index for Image
  std::optional<int> visual_position;
  int multimodal_position = 0;

  friend bool operator==(const LayoutEntry&, const LayoutEntry&) = default;
};

struct TokenLayout {
  std::vector<LayoutEntry> entries;
};

/// Checks every TextInstruction invariant and returns the instruction
/// unchanged. Error messages name the offending phrase or path element.
inline TextInstruction validate_instruction(TextInstruction raw) {
  if (raw.tokens.empty()) {
    throw SpanOutOfRange("instruction '" + raw.id + "' has no tokens");
  }
  const int length = static_cast<int>(raw.tokens.size());
  for (std::size_t i = 0; i < raw.phrases.size(); ++i) {
    const PhraseSpan& p = raw.phrases[i];
    if (p.start < 1 || p.end < p.start || p.end > length) {
      throw SpanOutOfRange("phrase " + std::to_string(i) + " ('" + p.text +
                           "') span [" + std::to_string(p.start) + ", " +
                           std::to_string(p.end) + "] outside 1.." +
                           std::to_string(length));
    }
    if (i > 0) {
      const PhraseSpan& prev = raw.phrases[i - 1];
      if (p.start < prev.start) {
        throw UnsortedSpans("phrase " + std::to_string(i) +
                            " starts before phrase " + std::to_string(i - 1));
      }
      if (p.start <= prev.end) {
        throw OverlappingSpans("phrase " + std::to_string(i) + " ('" + p.text +
                               "') overlaps phrase " + std::to_string(i - 1) +
                               " ('" + prev.text + "')");
      }
    }
  }
  if (raw.path_node_ids.empty()) {
    throw EmptyPath("instruction '" + raw.id + "' has an empty path");
  }
  for (std::size_t i = 1; i < raw.path_node_ids.size(); ++i) {
    if (raw.path_node_ids[i] == raw.path_node_ids[i - 1]) {
      throw RepeatedPathNode("path node " + std::to_string(i) + " ('" +
                             raw.path_node_ids[i] + "') repeats its predecessor");
    }
  }
  return raw;
}

/// Validates one prompt against the instruction it annotates.
inline void validate_prompt(const VisualPrompt& p, const TextInstruction& instr) {
  if (p.phrase_index < 0 ||
      p.phrase_index >= static_cast<int>(instr.phrases.size())) {
    throw InvalidPhraseIndex("prompt phrase_index " +
                             std::to_string(p.phrase_index) +
                             " out of range for instruction '" + instr.id + "'");
  }
  if (p.image_width <= 0 || p.image_height <= 0) {
    throw InvalidPrompt("prompt for phrase " + std::to_string(p.phrase_index) +
                        " has non-positive image dimensions");
  }
  if (p.bbox.w <= 0.0 || p.bbox.h <= 0.0 || p.bbox.x < 0.0 || p.bbox.y < 0.0 ||
      p.bbox.x + p.bbox.w > p.image_width ||
      p.bbox.y + p.bbox.h > p.image_height) {
    throw InvalidPrompt("prompt for phrase " + std::to_string(p.phrase_index) +
                        " has a box outside its image");
  }
}

/// Checks every MultiModalInstruction invariant.
inline void validate_multimodal(const MultiModalInstruction& mmi) {
  validate_instruction(mmi.base);
  for (std::size_t i = 0; i < mmi.prompts.size(); ++i) {
    validate_prompt(mmi.prompts[i], mmi.base);
    if (i > 0 && mmi.prompts[i].phrase_index <= mmi.prompts[i - 1].phrase_index) {
      throw DuplicatePhraseIndex(
          "prompts must carry strictly increasing phrase indices");
    }
  }
  if (mmi.setting == PromptSetting::Terminal && mmi.prompts.size() > 1) {
    throw InvalidPrompt("terminal instruction carries more than one prompt");
  }
  if (mmi.setting == PromptSetting::TextOnly && !mmi.prompts.empty()) {
    throw InvalidPrompt("text-only instruction carries prompts");
  }
}

/// Inserts each image next to its phrase, producing the combined sequence
/// (x_{1:end_1}, I_1, x_{end_1+1:end_2}, I_2, ..., I_n, x_{end_n+1:L}).
/// Prompts end up sorted by phrase_index. An empty prompt list yields a
/// text-only instruction regardless of `setting`.
inline MultiModalInstruction interleave(TextInstruction instr,
                                        std::vector<VisualPrompt> prompts,
                                        PromptSetting setting = PromptSetting::Aligned) {
  instr = validate_instruction(std::move(instr));
  for (const VisualPrompt& p : prompts) validate_prompt(p, instr);
  std::stable_sort(prompts.begin(), prompts.end(),
                   [](const VisualPrompt& a, const VisualPrompt& b) {
                     return a.phrase_index < b.phrase_index;
                   });
  for (std::size_t i = 1; i < prompts.size(); ++i) {
    if (prompts[i].phrase_index == prompts[i - 1].phrase_index) {
      throw DuplicatePhraseIndex("two prompts target phrase " +
                                 std::to_string(prompts[i].phrase_index));
    }
  }
  MultiModalInstruction mmi;
  mmi.base = std::move(instr);
  mmi.prompts = std::move(prompts);
  mmi.setting = mmi.prompts.empty() ? PromptSetting::TextOnly : setting;
  validate_multimodal(mmi);
  return mmi;
}

namespace detail {

/// Order-preserving seeded choice of k distinct prompt indices out of n.
/// Hand-rolled shuffle so the draw is identical on every platform.
inline std::vector<int> sample_indices(int n, int k, std::uint64_t seed) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(std::min(n, k)));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

/// Restricts a multi-modal instruction to a target setting.
/// Terminal keeps only the prompt with the largest phrase index; TextOnly
/// drops all prompts; Aligned/Related keep everything unless `keep` asks for
/// a seeded-random subset of min(keep, n) prompts in phrase order.
inline MultiModalInstruction restrict_setting(const MultiModalInstruction& mmi,
                                              PromptSetting target,
                                              std::optional<int> keep = std::nullopt,
                                              std::uint64_t seed = 0) {
  MultiModalInstruction out;
  out.base = mmi.base;
  out.setting = target;
  switch (target) {
    case PromptSetting::TextOnly:
      break;
    case PromptSetting::Terminal:
      if (!mmi.prompts.empty()) out.prompts.push_back(mmi.prompts.back());
      break;
    case PromptSetting::Aligned:
    case PromptSetting::Related: {
      if (!keep) {
        out.prompts = mmi.prompts;
      } else {
        const int n = static_cast<int>(mmi.prompts.size());
        for (int i : detail::sample_indices(n, std::max(0, *keep), seed)) {
          out.prompts.push_back(mmi.prompts[static_cast<std::size_t>(i)]);
        }
      }
      break;
    }
  }
  return out;
}

/// Lays out the combined token sequence with both position encodings.
/// Text tokens keep 0-based text positions; every image entry sits right
/// after the last token of its phrase, carries its rank among images as
/// visual_position, and reuses that last token's multimodal_position.
inline TokenLayout assemble_token_layout(const MultiModalInstruction& mmi) {
  validate_multimodal(mmi);
  TokenLayout layout;
  const int length = static_cast<int>(mmi.base.tokens.size());
  layout.entries.reserve(mmi.base.tokens.size() + mmi.prompts.size());
  int next_prompt = 0;
  const int prompt_count = static_cast<int>(mmi.prompts.size());
  for (int t = 0; t < length; ++t) {
    layout.entries.push_back({TokenKind::Text, t, std::nullopt, t});
    while (next_prompt < prompt_count) {
      const VisualPrompt& p = mmi.prompts[static_cast<std::size_t>(next_prompt)];
      const int phrase_end = mmi.base.phrases[static_cast<std::size_t>(p.phrase_index)].end - 1;
      if (phrase_end != t) break;
      layout.entries.push_back({TokenKind::Image, next_prompt, next_prompt, t});
      ++next_prompt;
    }
  }
  return layout;
}

}  // namespace navprompt
