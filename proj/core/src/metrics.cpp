// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/metrics.hpp"

#include <limits>

#include "dubkit/error.hpp"
#include "dubkit/utf8.hpp"

namespace dubkit::metrics {
namespace {

struct PathScore {
  double value = 0;  // sum of (cost - lambda) along the path
  double cost = 0;   // sum of cost along the path
  std::int64_t steps = 0;
};

// Best monotone path from (0,0) to (n-1,m-1) under per-cell cost c - lambda.
PathScore best_path(const Matrix& cost, double lambda) {
  const auto n = cost.rows();
  const auto m = cost.cols();
  std::vector<PathScore> prev(static_cast<std::size_t>(m)), cur(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double c = cost(i, j);
      PathScore best;
      if (i == 0 && j == 0) {
        best = {0, 0, 0};
      } else {
        best.value = std::numeric_limits<double>::infinity();
        auto consider = [&](const PathScore& p) {
          if (p.value < best.value) best = p;
        };
        if (i > 0 && j > 0) consider(prev[static_cast<std::size_t>(j - 1)]);
        if (i > 0) consider(prev[static_cast<std::size_t>(j)]);
        if (j > 0) consider(cur[static_cast<std::size_t>(j - 1)]);
      }
      best.value += c - lambda;
      best.cost += c;
      best.steps += 1;
      cur[static_cast<std::size_t>(j)] = best;
    }
    std::swap(prev, cur);
  }
  return prev[static_cast<std::size_t>(m - 1)];
}

Matrix cepstral_view(const Matrix& x, bool drop_c0) {
  if (!drop_c0) return x;
  if (x.cols() < 2) throw Error("mcd_dtw: need at least one coefficient besides c0");
  return x.rightCols(x.cols() - 1);
}

std::u32string strip_spaces(std::string_view s) {
  std::u32string out;
  for (char32_t c : utf8::decode(s)) {
    if (!utf8::is_space(c)) out.push_back(c);
  }
  return out;
}

}  // namespace

double spk_tl(std::span<const FrameInterval> reference, const IntervalSet& predicted) {
  if (reference.empty()) throw Error("spk_tl: empty reference set");
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i].empty() || reference[i].start < 0) {
      throw Error("spk_tl: reference intervals must be non-empty with start >= 0");
    }
    if (i > 0 && reference[i].start < reference[i - 1].end) {
      throw Error("spk_tl: reference intervals must be sorted and non-overlapping");
    }
  }
  const std::size_t n = reference.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Cell i spans [lo, hi); the gap between neighbours splits at its centre,
    // an exact tie going to the earlier interval.
    const std::int64_t lo = i == 0 ? std::numeric_limits<std::int64_t>::min()
                                   : (reference[i - 1].end + reference[i].start - 1) / 2 + 1;
    const std::int64_t hi = i + 1 == n ? std::numeric_limits<std::int64_t>::max()
                                       : (reference[i].end + reference[i + 1].start - 1) / 2 + 1;
    const std::int64_t attributed = predicted.overlap_length({lo, hi});
    const std::int64_t hit = predicted.overlap_length(reference[i]);
    const double recall = static_cast<double>(hit) / static_cast<double>(reference[i].length());
    const double leak =
        attributed == 0 ? 0.0 : static_cast<double>(attributed - hit) / static_cast<double>(attributed);
    sum += recall - leak;
  }
  return 0.5 - sum / (2.0 * static_cast<double>(n));
}

double mcd(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("mcd: coefficient dimension mismatch");
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sq += d * d;
  }
  return kMcdScale * std::sqrt(sq);
}

double mcd_dtw(const Matrix& a, const Matrix& b, const McdOptions& opts) {
  if (a.rows() == 0 || b.rows() == 0) throw Error("mcd_dtw: empty cepstral sequence");
  if (a.cols() != b.cols()) throw Error("mcd_dtw: coefficient dimension mismatch");
  if (!a.allFinite() || !b.allFinite()) throw Error("mcd_dtw: non-finite coefficients");
  const Matrix x = cepstral_view(a, opts.drop_c0);
  const Matrix y = cepstral_view(b, opts.drop_c0);
  const auto k = static_cast<std::size_t>(x.cols());
  Matrix cost(x.rows(), y.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      cost(i, j) = mcd({x.row(i).data(), k}, {y.row(j).data(), k});
    }
  }
  PathScore p = best_path(cost, 0.0);
  double lambda = p.cost / static_cast<double>(p.steps);
  if (opts.average == DtwAverage::kMinSumPath) return lambda;
  // Dinkelbach iteration: each step moves to a path with strictly smaller
  // mean cost until no path beats the current mean.
  for (int iter = 0; iter < 200; ++iter) {
    p = best_path(cost, lambda);
    if (p.value >= -1e-12 * std::max(1.0, lambda)) break;
    const double next = p.cost / static_cast<double>(p.steps);
    if (!(next < lambda)) break;
    lambda = next;
  }
  return lambda;
}

double mcd_dtw_sl(const Matrix& ref, const Matrix& syn, const McdOptions& opts) {
  const double base = mcd_dtw(ref, syn, opts);
  const double omega = static_cast<double>(std::max(ref.rows(), syn.rows())) /
                       static_cast<double>(ref.rows());
  return omega * base;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char32_t c : utf8::decode(s)) {
    if (utf8::is_space(c)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      utf8::append(cur, c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

double cer(std::string_view ref, std::string_view hyp) {
  const auto r = strip_spaces(ref);
  const auto h = strip_spaces(hyp);
  if (r.empty()) throw Error("cer: empty reference");
  return static_cast<double>(edit_distance<char32_t>(r, h)) / static_cast<double>(r.size());
}

double wer(std::string_view ref, std::string_view hyp) {
  const auto r = split_words(ref);
  const auto h = split_words(hyp);
  if (r.empty()) throw Error("wer: empty reference");
  return static_cast<double>(edit_distance<std::string>(r, h)) / static_cast<double>(r.size());
}

double cosine_sim(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error("cosine_sim: dimension mismatch");
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0 || nv == 0) throw Error("cosine_sim: zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

double pooled_cosine_sim(const Matrix& interval_embeddings, std::span<const double> reference) {
  if (interval_embeddings.rows() == 0) throw Error("pooled_cosine_sim: no intervals");
  const RowVector mean = interval_embeddings.colwise().mean();
  return cosine_sim({mean.data(), static_cast<std::size_t>(mean.size())}, reference);
}

}  // namespace dubkit::metrics
