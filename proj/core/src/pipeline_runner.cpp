// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "dubkit/artifacts.hpp"
#include "dubkit/error.hpp"
#include "dubkit/formats.hpp"
#include "pipeline_internal.hpp"

namespace dubkit::pipeline {
namespace {

using formats::SampleStatus;

struct RecordOutcome {
  std::vector<Stage> skipped;
};

void fail(SampleRecord& rec, Stage stage, std::string_view what) {
  rec.status = SampleStatus::kFailed;
  rec.failure = std::string(to_string(stage)) + ": " + std::string(what);
}

RecordOutcome process(SampleRecord& rec, const std::vector<std::pair<Stage, std::string>>& plan,
                      const detail::StageContext& ctx) {
  RecordOutcome out;
  for (const auto& [stage, hash] : plan) {
    if (rec.status != SampleStatus::kActive) break;
    const std::string name(to_string(stage));
    if (const auto it = rec.stage_hashes.find(name); it != rec.stage_hashes.end() && it->second == hash) {
      out.skipped.push_back(stage);
      continue;
    }
    try {
      detail::apply_stage(stage, rec, ctx);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(rec, stage, e.what());
      break;
    }
    rec.stage_hashes[name] = hash;
  }
  return out;
}

}  // namespace

nlohmann::json report_to_json(const RunReport& r) {
  return {{"input_records", r.input_records},
          {"sources_expanded", r.sources_expanded},
          {"input", r.input},
          {"kept", r.kept},
          {"discarded", r.discarded},
          {"failed", r.failed},
          {"conserved", r.conserved()},
          {"discarded_by_stage", r.discarded_by_stage},
          {"skipped_by_stage", r.skipped_by_stage},
          {"mllm_calls", r.mllm_calls}};
}

std::shared_ptr<correct::MllmClient> make_mllm_client(const MllmConfig& cfg) {
  std::unique_ptr<correct::MllmClient> inner;
  const std::chrono::milliseconds timeout(cfg.timeout_ms);
  if (cfg.transport == "mock") {
    inner = std::make_unique<correct::MockMllmClient>(cfg.fixture_dir);
  } else if (cfg.transport == "subprocess") {
    inner = std::make_unique<correct::SubprocessMllmClient>(cfg.command, timeout);
  } else if (cfg.transport == "http") {
    inner = std::make_unique<correct::HttpMllmClient>(cfg.url, cfg.path, timeout);
  } else {
    throw ConfigError("unknown mllm transport '" + cfg.transport + "'");
  }
  return std::make_shared<correct::BoundedMllmClient>(std::move(inner), cfg.max_parallel, cfg.retries);
}

RunResult run(const PipelineConfig& cfg, std::vector<SampleRecord> input, const RunOptions& opts) {
  if (opts.jobs < 1) throw ConfigError("jobs must be >= 1");
  RunResult result;
  result.report.input_records = input.size();

  // Everything that can fail on configuration happens before any sample is touched.
  correct::TemplateRegistry templates = correct::TemplateRegistry::builtin();
  correct::NormalizationTables tables = correct::NormalizationTables::builtin();
  std::shared_ptr<correct::MllmClient> mllm = opts.mllm;
  if (cfg.has(Stage::kCorrect)) {
    try {
      if (!cfg.correct.template_dir.empty()) templates.load_directory(cfg.correct.template_dir);
      if (!cfg.correct.char_map.empty()) tables.load_map_file(cfg.correct.char_map);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("correct: ") + e.what());
    }
    if (!templates.find(cfg.correct.template_id)) {
      throw ConfigError("correct: unknown template '" + cfg.correct.template_id + "'");
    }
    if (!mllm) mllm = make_mllm_client(cfg.mllm);
  }

  // Source expansion is sequential; it only reads subtitle files.
  std::vector<SampleRecord> samples;
  samples.reserve(input.size());
  for (auto& rec : input) {
    if (cfg.has(Stage::kSegmentIngest) && rec.kind == "source" && rec.status == SampleStatus::kActive) {
      try {
        const auto path = [&] {
          const auto it = rec.artifacts.find("srt");
          if (it == rec.artifacts.end()) throw Error("missing artifact 'srt'");
          const std::filesystem::path p(it->second);
          return p.is_absolute() ? p : cfg.data_root / p;
        }();
        const auto cues = formats::parse_srt(artifacts::read_file(path));
        auto clips = segment_source(rec, cues, cfg);
        ++result.report.sources_expanded;
        for (auto& c : clips) samples.push_back(std::move(c));
      } catch (const std::exception& e) {
        fail(rec, Stage::kSegmentIngest, e.what());
        samples.push_back(std::move(rec));
      }
    } else {
      samples.push_back(std::move(rec));
    }
  }

  std::vector<std::pair<Stage, std::string>> plan;
  for (const auto s : cfg.stages) {
    if (s == Stage::kSegmentIngest || s == Stage::kStats) continue;
    plan.emplace_back(s, stage_hash(cfg, s));
  }
  const detail::StageContext ctx{cfg, mllm.get(), &templates, &tables};

  std::vector<RecordOutcome> outcomes(samples.size());
  if (!plan.empty() && !samples.empty()) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mu;
    auto worker = [&] {
      for (std::size_t i = next++; i < samples.size(); i = next++) {
        try {
          outcomes[i] = process(samples[i], plan, ctx);
        } catch (...) {
          std::lock_guard lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          next = samples.size();
        }
      }
    };
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(opts.jobs), samples.size());
    if (n <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    if (fatal) std::rethrow_exception(fatal);
  }

  auto& rep = result.report;
  rep.input = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& rec = samples[i];
    switch (rec.status) {
      case SampleStatus::kActive: ++rep.kept; break;
      case SampleStatus::kDiscarded:
        ++rep.discarded;
        for (const auto& v : rec.verdicts) {
          if (!v.keep) ++rep.discarded_by_stage[v.stage];
        }
        break;
      case SampleStatus::kFailed: ++rep.failed; break;
    }
    for (const auto s : outcomes[i].skipped) ++rep.skipped_by_stage[std::string(to_string(s))];
  }
  if (const auto* bounded = dynamic_cast<const correct::BoundedMllmClient*>(mllm.get())) {
    rep.mllm_calls = bounded->calls();
  }
  result.records = std::move(samples);
  return result;
}

}  // namespace dubkit::pipeline
