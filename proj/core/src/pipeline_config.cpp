// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dubkit/error.hpp"
#include "dubkit/pipeline.hpp"
#include "pipeline_internal.hpp"

namespace dubkit::pipeline {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 10> kStageNames = {
    "segment-ingest", "separation-ingest", "overlap-filter", "diarize", "correct",
    "scene",          "tokenize",          "ssc-plan",       "metrics", "stats",
};

// Reads typed values out of one config block and rejects unknown keys.
class Block {
 public:
  Block(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(name_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + ": wrong type");
    }
  }

  void path(const char* key, std::filesystem::path& out, const std::filesystem::path& base) {
    std::string s;
    get(key, s);
    if (!s.empty()) out = base / s;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(name_ + ": unknown key '" + k + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string_view edit_unit_name(correct::EditUnit u) {
  return u == correct::EditUnit::kWord ? "word" : "char";
}

std::string_view clue_unit_name(ClueUnit u) {
  switch (u) {
    case ClueUnit::kWhitespace: return "whitespace";
    case ClueUnit::kCjk: return "cjk";
    case ClueUnit::kAuto: break;
  }
  return "auto";
}

}  // namespace

std::string_view to_string(Stage s) { return kStageNames.at(static_cast<std::size_t>(s)); }

std::optional<Stage> stage_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == s) return static_cast<Stage>(i);
  }
  return std::nullopt;
}

bool PipelineConfig::has(Stage s) const {
  return std::find(stages.begin(), stages.end(), s) != stages.end();
}

PipelineConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  PipelineConfig cfg;
  cfg.data_root = base_dir;

  Block top(doc, "config");
  std::vector<std::string> stage_names;
  top.get("stages", stage_names);
  for (const auto& n : stage_names) {
    const auto s = stage_from_string(n);
    if (!s) throw ConfigError("config.stages: unknown stage '" + n + "'");
    if (!cfg.stages.empty() && *s <= cfg.stages.back()) {
      throw ConfigError("config.stages: '" + n + "' is duplicated or out of order");
    }
    cfg.stages.push_back(*s);
  }
  top.get("fps", cfg.fps);
  if (cfg.fps <= 0) throw ConfigError("config.fps must be positive");
  top.get("seed", cfg.seed);
  top.path("data_root", cfg.data_root, base_dir);
  top.get("generated_dir", cfg.generated_dir);
  if (cfg.generated_dir.empty()) throw ConfigError("config.generated_dir must not be empty");

  for (const char* key : {"segment-ingest", "separation-ingest", "overlap-filter", "diarize", "correct",
                          "scene", "tokenize", "ssc-plan", "metrics", "stats", "mllm"}) {
    top.get(key, cfg.blocks[key]);
    if (cfg.blocks[key].is_null()) cfg.blocks[key] = json::object();
  }
  top.finish();

  {
    Block b(cfg.blocks["segment-ingest"], "segment-ingest");
    b.get("max_clip_seconds", cfg.segment.max_clip_seconds);
    b.get("clip_artifacts", cfg.segment.clip_artifacts);
    b.finish();
    if (cfg.segment.max_clip_seconds <= 0) throw ConfigError("segment-ingest.max_clip_seconds must be positive");
  }
  Block(cfg.blocks["separation-ingest"], "separation-ingest").finish();
  {
    Block b(cfg.blocks["overlap-filter"], "overlap-filter");
    b.get("role", cfg.overlap.role);
    b.finish();
  }
  {
    Block b(cfg.blocks["diarize"], "diarize");
    std::string method = "agglomerative";
    b.get("threshold", cfg.diarize.cluster.threshold);
    b.get("max_speakers", cfg.diarize.cluster.max_speakers);
    b.get("method", method);
    b.get("visual_weight", cfg.diarize.visual_weight);
    b.get("merge_adjacent", cfg.diarize.merge_adjacent);
    b.get("max_merge_gap", cfg.diarize.max_merge_gap);
    b.finish();
    if (method == "agglomerative") {
      cfg.diarize.cluster.method = diarize::ClusterMethod::kAgglomerative;
    } else if (method == "spectral") {
      cfg.diarize.cluster.method = diarize::ClusterMethod::kSpectral;
    } else {
      throw ConfigError("diarize.method must be 'agglomerative' or 'spectral'");
    }
    if (cfg.diarize.cluster.max_speakers < 1) throw ConfigError("diarize.max_speakers must be >= 1");
    if (cfg.diarize.visual_weight < 0 || cfg.diarize.visual_weight > 1) {
      throw ConfigError("diarize.visual_weight must be in [0, 1]");
    }
  }
  {
    Block b(cfg.blocks["correct"], "correct");
    std::string unit = "char";
    b.get("template_id", cfg.correct.template_id);
    b.path("template_dir", cfg.correct.template_dir, base_dir);
    b.path("char_map", cfg.correct.char_map, base_dir);
    b.get("edit_unit", unit);
    b.get("max_edit_ratio", cfg.correct.max_edit_ratio);
    b.finish();
    if (unit == "char") {
      cfg.correct.edit_unit = correct::EditUnit::kCharacter;
    } else if (unit == "word") {
      cfg.correct.edit_unit = correct::EditUnit::kWord;
    } else {
      throw ConfigError("correct.edit_unit must be 'char' or 'word'");
    }
  }
  Block(cfg.blocks["scene"], "scene").finish();
  {
    Block b(cfg.blocks["tokenize"], "tokenize");
    b.get("max_speakers", cfg.tokenize.max_speakers);
    b.finish();
    if (cfg.tokenize.max_speakers < 1) throw ConfigError("tokenize.max_speakers must be >= 1");
  }
  {
    Block b(cfg.blocks["ssc-plan"], "ssc-plan");
    b.get("neighborhood", cfg.ssc.neighborhood);
    b.get("cfg_drop_prob", cfg.ssc.cfg_drop_prob);
    b.finish();
    if (cfg.ssc.neighborhood < 0) throw ConfigError("ssc-plan.neighborhood must be >= 0");
    if (cfg.ssc.cfg_drop_prob < 0 || cfg.ssc.cfg_drop_prob > 1) {
      throw ConfigError("ssc-plan.cfg_drop_prob must be in [0, 1]");
    }
  }
  {
    Block b(cfg.blocks["metrics"], "metrics");
    std::string average = "min-mean";
    b.get("drop_c0", cfg.metrics.mcd.drop_c0);
    b.get("dtw_average", average);
    b.get("vad_source", cfg.metrics.vad_source);
    b.finish();
    if (average == "min-mean") {
      cfg.metrics.mcd.average = metrics::DtwAverage::kMinMeanPath;
    } else if (average == "min-sum") {
      cfg.metrics.mcd.average = metrics::DtwAverage::kMinSumPath;
    } else {
      throw ConfigError("metrics.dtw_average must be 'min-mean' or 'min-sum'");
    }
  }
  {
    Block b(cfg.blocks["stats"], "stats");
    std::string unit = "auto";
    b.get("clue_unit", unit);
    b.finish();
    if (unit == "auto") {
      cfg.stats.clue_unit = ClueUnit::kAuto;
    } else if (unit == "whitespace") {
      cfg.stats.clue_unit = ClueUnit::kWhitespace;
    } else if (unit == "cjk") {
      cfg.stats.clue_unit = ClueUnit::kCjk;
    } else {
      throw ConfigError("stats.clue_unit must be 'auto', 'whitespace' or 'cjk'");
    }
  }
  {
    Block b(cfg.blocks["mllm"], "mllm");
    b.get("transport", cfg.mllm.transport);
    b.path("fixture_dir", cfg.mllm.fixture_dir, base_dir);
    b.get("command", cfg.mllm.command);
    b.get("url", cfg.mllm.url);
    b.get("path", cfg.mllm.path);
    b.get("max_parallel", cfg.mllm.max_parallel);
    b.get("timeout_ms", cfg.mllm.timeout_ms);
    b.get("retries", cfg.mllm.retries);
    b.finish();
    const auto& t = cfg.mllm.transport;
    if (t != "mock" && t != "subprocess" && t != "http") {
      throw ConfigError("mllm.transport must be 'mock', 'subprocess' or 'http'");
    }
    if (t == "subprocess" && cfg.mllm.command.empty()) throw ConfigError("mllm.command is required");
    if (t == "http" && cfg.mllm.url.empty()) throw ConfigError("mllm.url is required");
    if (cfg.mllm.max_parallel < 1) throw ConfigError("mllm.max_parallel must be >= 1");
    if (cfg.mllm.timeout_ms < 1) throw ConfigError("mllm.timeout_ms must be >= 1");
    if (cfg.mllm.retries < 0) throw ConfigError("mllm.retries must be >= 0");
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(doc, base);
}

std::string stage_hash(const PipelineConfig& cfg, Stage stage) {
  json key = {{"stage", to_string(stage)}, {"fps", cfg.fps}};
  switch (stage) {
    case Stage::kSegmentIngest:
      key["max_clip_seconds"] = cfg.segment.max_clip_seconds;
      key["clip_artifacts"] = cfg.segment.clip_artifacts;
      break;
    case Stage::kOverlapFilter:
      key["role"] = cfg.overlap.role;
      break;
    case Stage::kDiarize:
      key["threshold"] = cfg.diarize.cluster.threshold;
      key["max_speakers"] = cfg.diarize.cluster.max_speakers;
      key["method"] = cfg.diarize.cluster.method == diarize::ClusterMethod::kSpectral ? "spectral"
                                                                                      : "agglomerative";
      key["visual_weight"] = cfg.diarize.visual_weight;
      key["merge_adjacent"] = cfg.diarize.merge_adjacent;
      key["max_merge_gap"] = cfg.diarize.max_merge_gap;
      key["generated_dir"] = cfg.generated_dir;
      break;
    case Stage::kCorrect:
      key["template_id"] = cfg.correct.template_id;
      key["template_dir"] = cfg.correct.template_dir.generic_string();
      key["char_map"] = cfg.correct.char_map.generic_string();
      key["edit_unit"] = edit_unit_name(cfg.correct.edit_unit);
      key["max_edit_ratio"] = cfg.correct.max_edit_ratio;
      key["transport"] = cfg.mllm.transport;
      key["fixture_dir"] = cfg.mllm.fixture_dir.generic_string();
      key["command"] = cfg.mllm.command;
      key["url"] = cfg.mllm.url + cfg.mllm.path;
      break;
    case Stage::kTokenize:
      key["max_speakers"] = cfg.tokenize.max_speakers;
      key["generated_dir"] = cfg.generated_dir;
      break;
    case Stage::kSscPlan:
      key["neighborhood"] = cfg.ssc.neighborhood;
      key["cfg_drop_prob"] = cfg.ssc.cfg_drop_prob;
      key["seed"] = cfg.seed;
      break;
    case Stage::kMetrics:
      key["drop_c0"] = cfg.metrics.mcd.drop_c0;
      key["dtw_average"] = cfg.metrics.mcd.average == metrics::DtwAverage::kMinSumPath ? "min-sum" : "min-mean";
      key["vad_source"] = cfg.metrics.vad_source;
      break;
    case Stage::kStats:
      key["clue_unit"] = clue_unit_name(cfg.stats.clue_unit);
      break;
    case Stage::kSeparationIngest:
    case Stage::kScene:
      break;
  }
  return hex64(detail::fnv1a(key.dump()));
}

}  // namespace dubkit::pipeline
