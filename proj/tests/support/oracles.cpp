// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

double spk_tl(const std::vector<dubkit::FrameInterval>& reference, const std::set<std::int64_t>& predicted) {
  const std::size_t n = reference.size();
  std::vector<double> in_ref(n, 0.0);
  std::vector<double> assigned(n, 0.0);
  for (const auto f : predicted) {
    const double centre = static_cast<double>(f) + 0.5;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double s = static_cast<double>(reference[i].start);
      const double e = static_cast<double>(reference[i].end);
      const double d = centre < s ? s - centre : (centre > e ? centre - e : 0.0);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    assigned[best] += 1.0;
    if (f >= reference[best].start && f < reference[best].end) in_ref[best] += 1.0;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double len = static_cast<double>(reference[i].end - reference[i].start);
    const double leak = assigned[i] == 0.0 ? 0.0 : (assigned[i] - in_ref[i]) / assigned[i];
    sum += in_ref[i] / len - leak;
  }
  return 0.5 - sum / (2.0 * static_cast<double>(n));
}

double mcd_frame(const dubkit::Matrix& a, int ra, const dubkit::Matrix& b, int rb, bool drop_c0) {
  double sq = 0.0;
  for (int k = drop_c0 ? 1 : 0; k < a.cols(); ++k) {
    const double d = a(ra, k) - b(rb, k);
    sq += d * d;
  }
  return 10.0 / std::log(10.0) * std::sqrt(2.0 * sq);
}

double mcd_dtw_exhaustive(const dubkit::Matrix& a, const dubkit::Matrix& b, bool drop_c0) {
  const int ta = static_cast<int>(a.rows());
  const int tb = static_cast<int>(b.rows());
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int, double, int)> walk = [&](int i, int j, double cost, int steps) {
    cost += mcd_frame(a, i, b, j, drop_c0);
    ++steps;
    if (i == ta - 1 && j == tb - 1) {
      best = std::min(best, cost / steps);
      return;
    }
    if (i + 1 < ta) walk(i + 1, j, cost, steps);
    if (j + 1 < tb) walk(i, j + 1, cost, steps);
    if (i + 1 < ta && j + 1 < tb) walk(i + 1, j + 1, cost, steps);
  };
  walk(0, 0, 0.0, 0);
  return best;
}

std::size_t count_paths(int ta, int tb) {
  std::vector<std::vector<std::size_t>> c(ta, std::vector<std::size_t>(tb, 0));
  for (int i = 0; i < ta; ++i) {
    for (int j = 0; j < tb; ++j) {
      if (i == 0 && j == 0) {
        c[i][j] = 1;
        continue;
      }
      if (i > 0) c[i][j] += c[i - 1][j];
      if (j > 0) c[i][j] += c[i][j - 1];
      if (i > 0 && j > 0) c[i][j] += c[i - 1][j - 1];
    }
  }
  return c[ta - 1][tb - 1];
}

double contrastive_loss(const dubkit::Matrix& lip, const dubkit::Matrix& st, const std::vector<std::uint8_t>& tau,
                        const std::vector<double>& w, double temperature) {
  const int t_len = static_cast<int>(lip.rows());
  double loss = 0.0;
  for (int t = 0; t < t_len; ++t) {
    std::vector<double> logits(t_len);
    for (int s = 0; s < t_len; ++s) {
      double dot = 0.0;
      for (int d = 0; d < lip.cols(); ++d) dot += lip(t, d) * st(s, d);
      logits[s] = dot / temperature;
    }
    double denom = 0.0;
    for (int s = 0; s < t_len; ++s) denom += std::exp(logits[s]);
    loss -= tau[t] * w[t] * (logits[t] - std::log(denom));
  }
  return loss;
}

std::u32string utf32(const std::string& s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

}  // namespace oracle
