// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "dubkit/diarize.hpp"

namespace {

using namespace dubkit;

// Segments drawn around four speaker centroids.
Matrix segment_affinity(std::int64_t n) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> d;
  Matrix centers(4, 192);
  for (Eigen::Index i = 0; i < centers.size(); ++i) centers.data()[i] = d(gen);
  Matrix x(n, 192);
  for (std::int64_t r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < 192; ++c) x(r, c) = centers(r % 4, c) + 0.3 * d(gen);
  }
  return diarize::cosine_affinity(x);
}

void BM_Agglomerative(benchmark::State& state) {
  const auto a = segment_affinity(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(diarize::cluster_speakers(a));
}
BENCHMARK(BM_Agglomerative)->RangeMultiplier(2)->Range(8, 256)->Unit(benchmark::kMicrosecond);

void BM_Spectral(benchmark::State& state) {
  const auto a = segment_affinity(state.range(0));
  const diarize::ClusterOptions opts{diarize::kDefaultThreshold, 16, diarize::ClusterMethod::kSpectral};
  for (auto _ : state) benchmark::DoNotOptimize(diarize::cluster_speakers(a, opts));
}
BENCHMARK(BM_Spectral)->RangeMultiplier(2)->Range(8, 256)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
