// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Stage orchestration over a manifest: ingest, filters, diarization,
// correction, tokenization, conditioning plans, metrics and statistics.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dubkit/correct.hpp"
#include "dubkit/diarize.hpp"
#include "dubkit/intervals.hpp"
#include "dubkit/manifest.hpp"
#include "dubkit/metrics.hpp"
#include "dubkit/mllm_client.hpp"

namespace dubkit::pipeline {

using formats::SampleRecord;

// Declaration order is the canonical execution order.
enum class Stage {
  kSegmentIngest,
  kSeparationIngest,
  kOverlapFilter,
  kDiarize,
  kCorrect,
  kScene,
  kTokenize,
  kSscPlan,
  kMetrics,
  kStats,
};

std::string_view to_string(Stage s);
std::optional<Stage> stage_from_string(std::string_view s);

struct SegmentConfig {
  double max_clip_seconds = 60.0;
  std::map<std::string, std::string> clip_artifacts;  // role -> path template with {clip_id}
};

struct OverlapConfig {
  std::string role = "overlap";  // RTTM of overlapped-speech regions
};

struct DiarizeConfig {
  diarize::ClusterOptions cluster;
  double visual_weight = diarize::kDefaultVisualWeight;
  bool merge_adjacent = false;
  std::int64_t max_merge_gap = 0;
};

struct CorrectConfig {
  std::string template_id = std::string(correct::kDefaultTemplateId);
  std::filesystem::path template_dir;  // extra <id>.txt templates
  std::filesystem::path char_map;      // extra OpenCC-style mapping file
  correct::EditUnit edit_unit = correct::EditUnit::kCharacter;
  double max_edit_ratio = correct::kMaxTranscriptEditRatio;
};

struct TokenizeConfig {
  int max_speakers = 16;
};

struct SscConfig {
  std::int64_t neighborhood = 25;
  double cfg_drop_prob = 0.1;
};

struct MetricsConfig {
  metrics::McdOptions mcd;
  std::string vad_source = "unspecified";  // recorded with SPK-TL scores
};

enum class ClueUnit { kAuto, kWhitespace, kCjk };

struct StatsConfig {
  ClueUnit clue_unit = ClueUnit::kAuto;
};

struct MllmConfig {
  std::string transport = "mock";  // mock | subprocess | http
  std::filesystem::path fixture_dir;
  std::vector<std::string> command;
  std::string url;
  std::string path = "/v1/correct";
  int max_parallel = 4;
  int timeout_ms = 60000;
  int retries = 1;
};

struct PipelineConfig {
  std::vector<Stage> stages;  // canonical order, no duplicates
  int fps = kDefaultFps;
  std::uint64_t seed = 0;
  std::filesystem::path data_root;  // artifact paths resolve against this
  std::string generated_dir = "generated";
  SegmentConfig segment;
  OverlapConfig overlap;
  DiarizeConfig diarize;
  CorrectConfig correct;
  TokenizeConfig tokenize;
  SscConfig ssc;
  MetricsConfig metrics;
  StatsConfig stats;
  MllmConfig mllm;
  /// Raw per-stage blocks as written, hashed for stage idempotence.
  std::map<std::string, nlohmann::json> blocks;

  bool has(Stage s) const;
};

/// Validates and types a JSON config document. `base_dir` is the default
/// data_root and anchors relative paths. Throws ConfigError.
PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// Content hash of everything that can change the output of `stage`.
std::string stage_hash(const PipelineConfig& cfg, Stage stage);

// --- per-sample stage functions -------------------------------------------------

/// Discards when any overlap interval intersects [0, clip_frames). Intervals
/// that only touch the clip boundary do not count.
FilterVerdict overlap_filter(std::int64_t clip_frames, const IntervalSet& overlaps);

/// Splits a source record into one clip per subtitle cue, ids
/// "<source>_<cue index:04>". Cues longer than max_clip_seconds come back
/// discarded.
std::vector<SampleRecord> segment_source(const SampleRecord& source, std::span<const formats::SrtCue> cues,
                                         const PipelineConfig& cfg);

// --- runs -----------------------------------------------------------------------

struct RunReport {
  std::size_t input_records = 0;
  std::size_t sources_expanded = 0;
  std::size_t input = 0;  // samples after source expansion
  std::size_t kept = 0;
  std::size_t discarded = 0;
  std::size_t failed = 0;
  std::map<std::string, std::size_t> discarded_by_stage;
  std::map<std::string, std::size_t> skipped_by_stage;  // already processed with this config
  std::size_t mllm_calls = 0;

  bool conserved() const { return input == kept + discarded + failed; }
};

nlohmann::json report_to_json(const RunReport& r);

struct RunOptions {
  int jobs = 1;
  /// Overrides the configured transport when set (tests).
  std::shared_ptr<correct::MllmClient> mllm;
};

struct RunResult {
  std::vector<SampleRecord> records;
  RunReport report;
};

/// Runs the configured stages over `input`. Per-record stages run on a pool
/// of `jobs` workers; output order equals input order. Missing artifacts mark
/// a sample failed, the run continues.
RunResult run(const PipelineConfig& cfg, std::vector<SampleRecord> input, const RunOptions& opts = {});

/// Builds the configured MLLM client wrapped in a BoundedMllmClient.
std::shared_ptr<correct::MllmClient> make_mllm_client(const MllmConfig& cfg);

// --- aggregate outputs ------------------------------------------------------------

/// Clip-by-metric table (tab-separated, header row, one line per active clip
/// with any metric or score).
std::string metrics_table(const std::vector<SampleRecord>& records);

/// Column means per scene and overall, using the results-table column names
/// (CER, WER, SPK-SIM and EMO-SIM in percent).
nlohmann::json metrics_summary(const std::vector<SampleRecord>& records, const MetricsConfig& cfg);

struct Distribution {
  std::map<std::string, std::size_t> counts;
  std::map<std::string, double> fractions;  // sums to 1 when counts is non-empty
};

struct DatasetStats {
  std::size_t clips = 0;
  Distribution scene;
  Distribution gender;  // over speakers
  Distribution age;     // over speakers
  std::size_t clues = 0;
  double clue_length_mean = 0.0;
  double clue_length_variance = 0.0;  // population variance
  double non_neutral_emotion_fraction = 0.0;
  double total_hours = 0.0;
  double average_clip_seconds = 0.0;
};

/// Clue length in tokens: whitespace words, CJK characters, or for kAuto
/// every CJK character plus every whitespace-delimited non-CJK run.
std::size_t clue_length(std::string_view clue, ClueUnit unit);

/// Statistics over active clip records.
DatasetStats compute_stats(const std::vector<SampleRecord>& records, const StatsConfig& cfg = {});
nlohmann::json stats_to_json(const DatasetStats& s);

struct TestsetResult {
  std::vector<SampleRecord> records;
  std::vector<std::string> warnings;
};

/// Per series, the lexicographically first active clip of each scene, at most
/// `per_series` of them, in scene order. Series missing a scene get a warning.
TestsetResult build_testset(const std::vector<SampleRecord>& records, int per_series = 4);

}  // namespace dubkit::pipeline
