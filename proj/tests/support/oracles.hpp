// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Slow, obviously-correct reference implementations used by the tests.
// Nothing here calls into the library code it checks.

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dubkit/matrix.hpp"
#include "dubkit/types.hpp"

namespace oracle {

/// Frame-by-frame SPK-TL: each predicted frame goes to the reference
/// interval closest to its centre (first one on ties).
double spk_tl(const std::vector<dubkit::FrameInterval>& reference, const std::set<std::int64_t>& predicted);

/// Full-matrix Levenshtein distance.
template <typename Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t best = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      if (d[i - 1][j] + 1 < best) best = d[i - 1][j] + 1;
      if (d[i][j - 1] + 1 < best) best = d[i][j - 1] + 1;
      d[i][j] = best;
    }
  }
  return d[a.size()][b.size()];
}

/// Per-frame MCD straight from the definition.
double mcd_frame(const dubkit::Matrix& a, int ra, const dubkit::Matrix& b, int rb, bool drop_c0);

/// Minimum mean step cost over every monotone (1,0)/(0,1)/(1,1) path,
/// by explicit enumeration.
double mcd_dtw_exhaustive(const dubkit::Matrix& a, const dubkit::Matrix& b, bool drop_c0);

/// Number of monotone paths, to keep enumerations honest.
std::size_t count_paths(int ta, int tb);

/// Contrastive loss with explicit loops (InfoNCE over the speech-token index).
double contrastive_loss(const dubkit::Matrix& lip, const dubkit::Matrix& st, const std::vector<std::uint8_t>& tau,
                        const std::vector<double>& w, double temperature);

/// Decodes UTF-8 without any error handling; test inputs are valid.
std::u32string utf32(const std::string& s);

}  // namespace oracle
