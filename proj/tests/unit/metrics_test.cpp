// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <functional>
#include <limits>
#include <set>

#include "dubkit/error.hpp"
#include "dubkit/metrics.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace dubkit::metrics {
namespace {

// Average along the cheapest-total path, by exhaustive search.
double min_sum_path_average(const Matrix& a, const Matrix& b) {
  const int ta = static_cast<int>(a.rows());
  const int tb = static_cast<int>(b.rows());
  double best = std::numeric_limits<double>::infinity();
  double best_avg = 0;
  std::function<void(int, int, double, int)> walk = [&](int i, int j, double cost, int steps) {
    cost += oracle::mcd_frame(a, i, b, j, true);
    ++steps;
    if (i == ta - 1 && j == tb - 1) {
      if (cost < best) {
        best = cost;
        best_avg = cost / steps;
      }
      return;
    }
    if (i + 1 < ta) walk(i + 1, j, cost, steps);
    if (j + 1 < tb) walk(i, j + 1, cost, steps);
    if (i + 1 < ta && j + 1 < tb) walk(i + 1, j + 1, cost, steps);
  };
  walk(0, 0, 0.0, 0);
  return best_avg;
}

TEST(EditDistance, KnownPairs) {
  const std::string a = "kitten";
  const std::string b = "sitting";
  EXPECT_EQ(edit_distance<char>(a, b), 3u);
  EXPECT_EQ(edit_distance<char>(b, a), 3u);
  EXPECT_EQ(edit_distance<char>(std::string_view(""), std::string_view("abc")), 3u);
  EXPECT_EQ(edit_distance<char>(a, a), 0u);
}

TEST(EditDistance, MatchesFullTableOracle) {
  gen::Rng rng(91);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = gen::text(rng, 25);
    const auto b = gen::text(rng, 25);
    const auto ua = oracle::utf32(a);
    const auto ub = oracle::utf32(b);
    EXPECT_EQ(edit_distance<char32_t>(ua, ub), oracle::levenshtein(ua, ub));
  }
}

TEST(ErrorRates, CerAndWer) {
  EXPECT_DOUBLE_EQ(cer("kitten", "sitting"), 0.5);
  EXPECT_DOUBLE_EQ(cer("你 好", "你好吗"), 0.5);  // whitespace ignored
  EXPECT_DOUBLE_EQ(wer("the cat sat", "the cat sat down"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(wer("a b", "  a   b "), 0.0);
  EXPECT_DOUBLE_EQ(wer("a b c d", ""), 1.0);
  EXPECT_THROW(cer(" ", "x"), Error);
  EXPECT_THROW(wer("", "x"), Error);
  EXPECT_EQ(split_words(" a\tb\n c "), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Cosine, ValuesAndErrors) {
  const std::vector<double> u = {1, 0}, v = {0, 2}, w = {-3, 0};
  EXPECT_DOUBLE_EQ(cosine_sim(u, u), 1.0);
  EXPECT_DOUBLE_EQ(cosine_sim(u, v), 0.0);
  EXPECT_DOUBLE_EQ(cosine_sim(u, w), -1.0);
  EXPECT_THROW(cosine_sim(u, std::vector<double>{0, 0}), Error);
  EXPECT_THROW(cosine_sim(u, std::vector<double>{1}), Error);
  Matrix rows(2, 2);
  rows << 1, 0, 0, 1;
  EXPECT_NEAR(pooled_cosine_sim(rows, std::vector<double>{1, 1}), 1.0, 1e-12);
  EXPECT_THROW(pooled_cosine_sim(Matrix(0, 2), u), Error);
}

TEST(Mcd, UnitDifferenceGivesTheScaleConstant) {
  EXPECT_NEAR(kMcdScale, 6.1419, 1e-4);
  const std::vector<double> a = {5, 1, 2, 3};
  const std::vector<double> b = {9, 1, 3, 3};
  EXPECT_NEAR(mcd(std::span<const double>(a).subspan(1), std::span<const double>(b).subspan(1)), kMcdScale, 1e-12);
  Matrix ma(1, 4), mb(1, 4);
  ma << 5, 1, 2, 3;
  mb << 9, 1, 3, 3;
  EXPECT_NEAR(mcd_dtw(ma, mb), kMcdScale, 1e-12);
  EXPECT_NEAR(mcd_dtw(ma, mb, {false}), kMcdScale * std::sqrt(17.0), 1e-12);
}

TEST(McdDtw, MinMeanPathMatchesExhaustiveSearch) {
  gen::Rng rng(92);
  for (int trial = 0; trial < 150; ++trial) {
    const int ta = gen::uniform_int(rng, 1, 6);
    const int tb = gen::uniform_int(rng, 1, 6);
    const Matrix a = gen::random_matrix(rng, ta, 4);
    const Matrix b = gen::random_matrix(rng, tb, 4);
    EXPECT_NEAR(mcd_dtw(a, b), oracle::mcd_dtw_exhaustive(a, b, true), 1e-9);
    EXPECT_NEAR(mcd_dtw(a, b, {true, DtwAverage::kMinSumPath}), min_sum_path_average(a, b), 1e-9);
    EXPECT_LE(mcd_dtw(a, b), mcd_dtw(a, b, {true, DtwAverage::kMinSumPath}) + 1e-12);
    EXPECT_NEAR(mcd_dtw(a, b), mcd_dtw(b, a), 1e-9);
  }
}

TEST(McdDtw, IdenticalSequencesScoreZero) {
  gen::Rng rng(93);
  const Matrix a = gen::random_matrix(rng, 30, 13);
  EXPECT_NEAR(mcd_dtw(a, a), 0.0, 1e-12);
  EXPECT_THROW(mcd_dtw(Matrix(0, 13), a), Error);
  EXPECT_THROW(mcd_dtw(a, Matrix::Zero(3, 12)), Error);
  EXPECT_THROW(mcd_dtw(Matrix::Zero(2, 1), Matrix::Zero(2, 1)), Error);
}

TEST(McdDtwSl, PenalizesLongerSynthesis) {
  gen::Rng rng(94);
  const Matrix ref = gen::random_matrix(rng, 10, 5);
  Matrix syn(20, 5);
  for (int i = 0; i < 20; ++i) syn.row(i) = ref.row(i / 2);
  EXPECT_NEAR(mcd_dtw(ref, syn), 0.0, 1e-12);
  const Matrix shifted = syn + Matrix::Constant(20, 5, 0.1);
  EXPECT_NEAR(mcd_dtw_sl(ref, shifted), 2.0 * mcd_dtw(ref, shifted), 1e-12);
  const Matrix short_syn = ref.topRows(5).array() + 0.1;
  EXPECT_NEAR(mcd_dtw_sl(ref, short_syn), mcd_dtw(ref, short_syn), 1e-12);
}

TEST(SpkTl, HandWorkedValues) {
  const std::vector<FrameInterval> ref = {{0, 10}, {20, 30}};
  EXPECT_DOUBLE_EQ(spk_tl(ref, IntervalSet::normalized({{0, 10}, {20, 30}})), 0.0);
  EXPECT_DOUBLE_EQ(spk_tl(ref, IntervalSet()), 0.5);
  // First interval half covered, second exact plus 5 leaked frames (25 -> 30..35).
  EXPECT_DOUBLE_EQ(spk_tl(ref, IntervalSet::normalized({{0, 5}, {20, 35}})),
                   0.5 - (0.5 + (1.0 - 5.0 / 15.0)) / 4.0);
  EXPECT_THROW(spk_tl({}, IntervalSet()), Error);
  EXPECT_THROW(spk_tl(std::vector<FrameInterval>{{5, 9}, {8, 12}}, IntervalSet()), Error);
}

TEST(SpkTl, MatchesBruteForceAndStaysInRange) {
  gen::Rng rng(95);
  for (int trial = 0; trial < 500; ++trial) {
    auto ref = gen::intervals(rng, 5, 200);
    if (ref.empty()) ref.push_back({0, 1});
    const auto pred = gen::intervals(rng, 6, 220);
    std::set<std::int64_t> frames;
    for (const auto& p : pred) {
      for (auto f = p.start; f < p.end; ++f) frames.insert(f);
    }
    const double got = spk_tl(ref, IntervalSet::normalized(pred));
    EXPECT_NEAR(got, oracle::spk_tl(ref, frames), 1e-12);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

}  // namespace
}  // namespace dubkit::metrics
