// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// A deterministic 20-sample corpus with every artifact the pipeline reads,
// plus the verdict ledger worked out by hand for it.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "dubkit/manifest.hpp"
#include "dubkit/types.hpp"

namespace fixture {

struct Expected {
  dubkit::formats::SampleStatus status;
  std::string stage;  // discarding stage, or the failure prefix
  std::optional<dubkit::Scene> scene;
};

struct Corpus {
  std::filesystem::path config;
  std::filesystem::path manifest;
  std::map<std::string, Expected> expected;  // clip id -> outcome
  std::size_t input_records = 0;
};

/// Writes config.json, manifest.jsonl, art/ and mllm/ under `dir`.
Corpus write_corpus(const std::filesystem::path& dir);

}  // namespace fixture
