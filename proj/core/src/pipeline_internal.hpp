// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dubkit/pipeline.hpp"
#include "dubkit/tst.hpp"

namespace dubkit::pipeline::detail {

struct StageContext {
  const PipelineConfig& cfg;
  correct::MllmClient* mllm = nullptr;
  const correct::TemplateRegistry* templates = nullptr;
  const correct::NormalizationTables* tables = nullptr;
};

std::uint64_t fnv1a(std::string_view s);

/// Runs one per-sample stage in place. Filters record a verdict and set the
/// status to discarded; any dubkit::Error means the sample failed.
void apply_stage(Stage stage, SampleRecord& rec, const StageContext& ctx);

}  // namespace dubkit::pipeline::detail
