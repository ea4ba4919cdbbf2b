// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// dubkit command line: one subcommand per stage group plus `run`.
// Exit codes: 0 success, 1 some samples failed, 2 configuration or usage error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dubkit/artifacts.hpp"
#include "dubkit/error.hpp"
#include "dubkit/manifest.hpp"
#include "dubkit/pipeline.hpp"

namespace {

using dubkit::pipeline::Stage;

constexpr int kExitOk = 0;
constexpr int kExitSampleFailures = 1;
constexpr int kExitConfig = 2;

struct Args {
  std::string config;
  std::string manifest;
  std::string out;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  int per_series = 4;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--config", a.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--manifest", a.manifest, "input manifest (JSON Lines)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "output path")->required();
  cmd->add_option("--jobs", a.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "overrides the config seed");
}

std::vector<Stage> group_stages(const std::string& cmd) {
  if (cmd == "ingest") return {Stage::kSegmentIngest, Stage::kSeparationIngest, Stage::kOverlapFilter};
  if (cmd == "diarize") return {Stage::kDiarize};
  if (cmd == "correct") return {Stage::kCorrect, Stage::kScene};
  if (cmd == "tokenize") return {Stage::kTokenize};
  if (cmd == "ssc-plan") return {Stage::kSscPlan};
  if (cmd == "metrics") return {Stage::kMetrics};
  return {};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  dubkit::artifacts::write_file(path, j.dump(2) + "\n");
}

int execute(const std::string& cmd, const Args& a) {
  dubkit::pipeline::PipelineConfig cfg;
  std::vector<dubkit::formats::SampleRecord> input;
  try {
    cfg = dubkit::pipeline::load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    if (cmd != "run") {
      // A group runs the stages of that group the config enables, or the
      // whole group when the config lists none of them.
      const auto group = group_stages(cmd);
      std::vector<Stage> chosen;
      for (const auto s : group) {
        if (cfg.has(s)) chosen.push_back(s);
      }
      cfg.stages = chosen.empty() ? group : chosen;
    }
    input = dubkit::formats::read_manifest_file(a.manifest);
  } catch (const dubkit::Error& e) {
    std::cerr << "dubkit " << cmd << ": " << e.what() << "\n";
    return kExitConfig;
  }

  if (cmd == "stats") {
    write_json(a.out, dubkit::pipeline::stats_to_json(dubkit::pipeline::compute_stats(input, cfg.stats)));
    return kExitOk;
  }
  if (cmd == "testset") {
    const auto ts = dubkit::pipeline::build_testset(input, a.per_series);
    for (const auto& w : ts.warnings) std::cerr << "warning: " << w << "\n";
    dubkit::formats::write_manifest_file(a.out, ts.records);
    return kExitOk;
  }

  dubkit::pipeline::RunResult result;
  try {
    result = dubkit::pipeline::run(cfg, std::move(input), {a.jobs, nullptr});
  } catch (const dubkit::ConfigError& e) {
    std::cerr << "dubkit " << cmd << ": " << e.what() << "\n";
    return kExitConfig;
  }
  dubkit::formats::write_manifest_file(a.out, result.records);
  write_json(a.out + ".report.json", dubkit::pipeline::report_to_json(result.report));
  if (cfg.has(Stage::kMetrics)) {
    dubkit::artifacts::write_file(a.out + ".metrics.tsv", dubkit::pipeline::metrics_table(result.records));
    write_json(a.out + ".metrics.json", dubkit::pipeline::metrics_summary(result.records, cfg.metrics));
  }
  if (cfg.has(Stage::kStats)) {
    write_json(a.out + ".stats.json",
               dubkit::pipeline::stats_to_json(dubkit::pipeline::compute_stats(result.records, cfg.stats)));
  }
  const auto& r = result.report;
  std::fprintf(stderr, "%s: %zu samples, %zu kept, %zu discarded, %zu failed\n", cmd.c_str(), r.input, r.kept,
               r.discarded, r.failed);
  return r.failed > 0 ? kExitSampleFailures : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dubkit: movie-dubbing dataset and evaluation toolkit"};
  app.require_subcommand(1);
  Args args;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"ingest", "segment sources, check separation outputs, filter overlapped speech"},
      {"diarize", "cluster speakers from embeddings and active-speaker scores"},
      {"correct", "MLLM correction, verification filters and scene labels"},
      {"tokenize", "encode timestamp-speaker tuples"},
      {"ssc-plan", "speaker-switching conditioning plans"},
      {"metrics", "evaluation metrics, table and summary"},
      {"stats", "dataset statistics as JSON"},
      {"testset", "pick one clip per scene per series"},
      {"run", "every stage listed in the config"},
  };
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, args);
    if (std::string(name) == "testset") {
      cmd->add_option("--per-series", args.per_series, "clips per series")->check(CLI::NonNegativeNumber);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return execute(cmd, args);
  } catch (const std::exception& e) {
    std::cerr << "dubkit " << cmd << ": " << e.what() << "\n";
    return kExitSampleFailures;
  }
}
