// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// MLLM-assisted transcript and speaker correction: prompt rendering,
// response parsing, text normalization, verification filters and scene
// categorization.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dubkit/manifest.hpp"
#include "dubkit/types.hpp"

namespace dubkit::correct {

/// (start seconds, speaker label, end seconds) as produced by diarization.
struct DiarTuple {
  double start = 0.0;
  std::string speaker;
  double end = 0.0;

  bool operator==(const DiarTuple&) const = default;
};

struct CorrectionRequest {
  std::string clip_id;
  std::string vocal_track;
  std::string asr_transcript;
  std::vector<DiarTuple> tuples;  // sorted, non-overlapping
};

struct SpeakerProfile {
  std::string label;
  Gender gender = Gender::kUnknown;
  AgeGroup age = AgeGroup::kUnknown;
  std::vector<std::string> timbre;

  bool operator==(const SpeakerProfile&) const = default;
};

struct CorrectionResponse {
  std::string transcript;
  int speaker_count = 0;
  std::vector<SpeakerProfile> speakers;  // speaker_count entries
  std::string long_clue;
  std::string short_clue;
  std::string emotion;

  bool operator==(const CorrectionResponse&) const = default;
};

// --- prompts ---------------------------------------------------------------

inline constexpr std::string_view kDefaultTemplateId = "cot_correction_v1";

/// Prompt templates with `{{name}}` placeholders. Available names:
/// clip_id, vocal_track, asr_transcript, num_tuples, tuples, output_schema.
class TemplateRegistry {
 public:
  /// Registry holding the built-in templates.
  static TemplateRegistry builtin();

  void add(std::string id, std::string text);
  /// Adds every `<id>.txt` file of `dir`.
  void load_directory(const std::filesystem::path& dir);
  const std::string* find(std::string_view id) const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

/// Tab-separated "start\tspeaker\tend" header plus one row per tuple, times
/// with millisecond precision.
std::string render_tuple_table(const std::vector<DiarTuple>& tuples);

std::string render_prompt(const CorrectionRequest& req, std::string_view template_id,
                          const TemplateRegistry& registry);

// --- responses -------------------------------------------------------------

/// Lenient enum coercion: unrecognized strings map to `unknown`.
Gender coerce_gender(std::string_view s);
AgeGroup coerce_age(std::string_view s);

/// Parses the JSON object in an MLLM reply (surrounding prose and code
/// fences are ignored). Throws dubkit::Error naming every missing field.
CorrectionResponse parse_response(std::string_view raw);

/// Canonical JSON rendering, the inverse of parse_response.
std::string render_response(const CorrectionResponse& resp);

// --- normalization -----------------------------------------------------------

/// Character conversion table (e.g. traditional -> simplified). Chains are
/// resolved when entries are added so that one pass reaches a fixed point.
class NormalizationTables {
 public:
  /// A curated traditional-to-simplified subset.
  static NormalizationTables builtin();

  void add(char32_t from, char32_t to);
  /// OpenCC-style "from<TAB>to [alternatives]" lines; single code points only.
  void load_map_file(const std::filesystem::path& path);
  char32_t map(char32_t c) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<char32_t, char32_t> map_;
};

/// Character mapping, full-width to half-width punctuation/letters, Unicode
/// decimal digits to ASCII, whitespace runs collapsed to one space, trimmed.
std::string normalize_text(std::string_view s, const NormalizationTables& tables);

// --- verification -------------------------------------------------------------

enum class EditUnit { kCharacter, kWord };

inline constexpr double kMaxTranscriptEditRatio = 0.5;

/// levenshtein(a, b) / max(|a|, |b|, 1) in code points or words.
double transcript_edit_ratio(std::string_view a, std::string_view b, EditUnit unit);

/// Keeps when the ratio is at most 0.5. Inputs are expected to be normalized.
FilterVerdict verify_transcript(std::string_view asr, std::string_view corrected,
                                EditUnit unit = EditUnit::kCharacter,
                                double max_ratio = kMaxTranscriptEditRatio);

struct SpeakerCheck {
  FilterVerdict verdict;
  /// Reconciled attributes keyed by diarization label (kept samples only).
  std::map<std::string, formats::SpeakerAttributes> attributes;
  std::map<std::string, std::vector<std::string>> timbre;
};

/// Discards on a speaker-count mismatch or when the labels cannot be paired
/// one-to-one. A gender/age value survives only if the MLLM states it and the
/// specialized model, where it has an opinion, agrees; otherwise `unknown`.
SpeakerCheck verify_speakers(const std::set<std::string>& diar_labels, const CorrectionResponse& resp,
                             const std::map<std::string, formats::SpeakerAttributes>& model_attrs = {});

/// (face, 1) monologue; (no face, 1) narration; 2 dialogue; 3+ multi-speaker.
Scene categorize_scene(bool has_face, int n_speakers);

}  // namespace dubkit::correct
