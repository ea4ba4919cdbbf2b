// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Evaluation metrics: SPK-TL, MCD-DTW(-SL), CER/WER and cosine similarity.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dubkit/intervals.hpp"
#include "dubkit/matrix.hpp"
#include "dubkit/types.hpp"

namespace dubkit::metrics {

/// Speaker truncation/leakage score in [0, 1], 0 best.
///
/// Every predicted active frame is attributed to the nearest reference
/// interval (distance measured from the frame centre to the interval; frames
/// inside an interval belong to it, ties go to the earlier interval). With
/// P_i the predicted frames attributed to reference I_i:
///
///   SPK-TL = 1/2 - 1/(2N) * sum_i ( |P_i n I_i| / |I_i| - |P_i \ I_i| / |P_i| )
///
/// where the leakage term is 0 when P_i is empty. `reference` must be
/// non-empty, sorted and non-overlapping.
double spk_tl(std::span<const FrameInterval> reference, const IntervalSet& predicted);

/// 10 * sqrt(2) / ln 10.
inline const double kMcdScale = 10.0 * std::sqrt(2.0) / std::log(10.0);

/// Per-frame mel-cepstral distortion between two coefficient rows.
double mcd(std::span<const double> a, std::span<const double> b);

enum class DtwAverage {
  kMinMeanPath,  // minimum over warping paths of the per-step average
  kMinSumPath,   // average along the minimum-total-cost path
};

struct McdOptions {
  bool drop_c0 = true;  // ignore column 0 (energy) of the cepstral matrices
  DtwAverage average = DtwAverage::kMinMeanPath;
};

/// MCD under dynamic time warping with steps (1,0), (0,1), (1,1).
double mcd_dtw(const Matrix& a, const Matrix& b, const McdOptions& opts = {});

/// mcd_dtw scaled by max(T_ref, T_syn) / T_ref.
double mcd_dtw_sl(const Matrix& ref, const Matrix& syn, const McdOptions& opts = {});

/// Levenshtein distance with unit insert/delete/substitute costs.
template <typename T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::vector<std::string> split_words(std::string_view s);

/// Character error rate over Unicode code points; whitespace is ignored.
double cer(std::string_view ref, std::string_view hyp);
/// Word error rate over whitespace-delimited tokens.
double wer(std::string_view ref, std::string_view hyp);

double cosine_sim(std::span<const double> u, std::span<const double> v);

/// SPK-SIM: mean of the per-interval embeddings (rows), compared to the reference.
double pooled_cosine_sim(const Matrix& interval_embeddings, std::span<const double> reference);

}  // namespace dubkit::metrics
