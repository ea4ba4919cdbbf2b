// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Line-delimited JSON manifest of SampleRecord. The field names are an
// external contract; see docs/manifest.md.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dubkit/types.hpp"

namespace dubkit::formats {

enum class SampleStatus { kActive, kDiscarded, kFailed };

std::string_view to_string(SampleStatus s);

/// A diarized speech segment, label as emitted by clustering ("spk0", ...).
struct DiarSegment {
  FrameInterval span;
  std::string speaker;

  bool operator==(const DiarSegment&) const = default;
};

/// Per-speaker attributes predicted by a specialized (non-MLLM) model.
struct SpeakerAttributes {
  Gender gender = Gender::kUnknown;
  AgeGroup age = AgeGroup::kUnknown;

  bool operator==(const SpeakerAttributes&) const = default;
};

struct SampleRecord {
  std::string clip_id;
  std::string kind = "clip";  // "clip" or "source" (an un-segmented long video)
  std::string series_id;
  double offset = 0.0;    // clip start inside its source video, seconds
  double duration = 0.0;  // seconds
  std::string transcript;
  std::string asr_transcript;
  std::string clue;
  std::string short_clue;
  std::optional<Scene> scene;
  std::optional<bool> has_face;
  std::vector<TimestampSpeakerTuple> tuples;
  std::vector<std::string> speaker_labels;  // clip-local speaker index -> label
  std::vector<DiarSegment> diarization;
  std::map<std::string, SpeakerAttributes> model_attrs;
  std::map<std::string, std::vector<std::string>> timbre;
  std::map<std::string, std::string> artifacts;  // role -> path
  std::optional<std::string> emotion;
  std::optional<ConditioningPlan> ssc_plan;
  std::optional<bool> cfg_drop;
  std::optional<std::string> hyp_transcript;
  std::map<std::string, double> scores;   // ingested external scores (UTMOS, LSE-C, ...)
  std::map<std::string, double> metrics;  // computed by the metrics stage
  std::vector<FilterVerdict> verdicts;
  SampleStatus status = SampleStatus::kActive;
  std::string failure;
  std::map<std::string, std::string> stage_hashes;
  nlohmann::json extra = nlohmann::json::object();  // unknown fields, preserved verbatim

  bool operator==(const SampleRecord&) const = default;
};

nlohmann::json record_to_json(const SampleRecord& r);
/// Throws dubkit::Error on schema violations (wrong types, bad enums,
/// overlapping or unsorted tuples, missing clip_id).
SampleRecord record_from_json(const nlohmann::json& j);

/// Parses a manifest; blank lines are skipped. Throws ParseError with the line number.
std::vector<SampleRecord> read_manifest(std::string_view text);
/// One compact JSON object per line with sorted keys; empty fields omitted.
std::string write_manifest(const std::vector<SampleRecord>& records);

std::vector<SampleRecord> read_manifest_file(const std::filesystem::path& path);
void write_manifest_file(const std::filesystem::path& path,
                         const std::vector<SampleRecord>& records);

}  // namespace dubkit::formats
