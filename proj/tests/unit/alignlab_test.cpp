// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "dubkit/alignlab.hpp"
#include "dubkit/error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace dubkit::align {
namespace {

TEST(VoiceActivity, SilentTokenIsInactive) {
  const std::vector<std::int32_t> tokens = {1, 0, 5, 1, 6559};
  EXPECT_EQ(voice_activity(tokens), (std::vector<std::uint8_t>{0, 1, 1, 0, 1}));
  EXPECT_NO_THROW(validate_speech_tokens(tokens));
  EXPECT_THROW(validate_speech_tokens(std::vector<std::int32_t>{6560}), Error);
  EXPECT_THROW(validate_speech_tokens(std::vector<std::int32_t>{-1}), Error);
}

TEST(VaLoss, MatchesBinaryCrossEntropy) {
  gen::Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen::uniform_int(rng, 1, 30);
    std::vector<std::uint8_t> tau(n);
    std::vector<double> p(n);
    double expected = 0.0;
    for (int i = 0; i < n; ++i) {
      tau[i] = static_cast<std::uint8_t>(gen::uniform_int(rng, 0, 1));
      p[i] = gen::uniform(rng, 0.01, 0.99);
      expected += tau[i] ? -std::log(p[i]) : -std::log(1.0 - p[i]);
    }
    EXPECT_NEAR(va_loss(tau, p), expected, 1e-9);
    EXPECT_NEAR(va_loss(tau, p, Reduction::kMean), expected / n, 1e-9);
  }
}

TEST(VaLoss, SaturatedPredictionsStayFinite) {
  const std::vector<std::uint8_t> tau = {1, 0};
  const std::vector<double> p = {0.0, 1.0};
  const double l = va_loss(tau, p);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_NEAR(l, -2.0 * std::log(kProbEpsilon), 1e-6);
  EXPECT_THROW(va_loss(tau, std::vector<double>{0.5}), Error);
  EXPECT_THROW(va_loss(tau, std::vector<double>{NAN, 0.5}), Error);
}

TEST(SpeechTokenLoss, AveragesNegativeLogLikelihood) {
  Matrix lp(2, 3);
  lp << std::log(0.5), std::log(0.25), std::log(0.25), std::log(0.1), std::log(0.8), std::log(0.1);
  const std::vector<std::int32_t> targets = {0, 1};
  EXPECT_NEAR(speech_token_loss(lp, targets), -(std::log(0.5) + std::log(0.8)) / 2, 1e-12);
  EXPECT_THROW(speech_token_loss(lp, std::vector<std::int32_t>{0}), Error);
  Matrix bad = lp;
  bad(0, 0) = 0.0;
  EXPECT_THROW(speech_token_loss(bad, targets), Error);
}

TEST(LipContrastive, MatchesNaiveOracle) {
  gen::Rng rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    const int T = gen::uniform_int(rng, 1, 12);
    const int D = gen::uniform_int(rng, 1, 6);
    const Matrix lip = gen::random_matrix(rng, T, D);
    const Matrix st = gen::random_matrix(rng, T, D);
    std::vector<std::uint8_t> tau(T);
    std::vector<double> w(T);
    for (int t = 0; t < T; ++t) {
      tau[t] = static_cast<std::uint8_t>(gen::uniform_int(rng, 0, 1));
      w[t] = gen::uniform(rng, 0.0, 1.0);
    }
    const double temp = gen::uniform(rng, 0.05, 2.0);
    const double expected = oracle::contrastive_loss(lip, st, tau, w, temp);
    EXPECT_NEAR(lip_contrastive_loss(lip, st, tau, w, temp), expected, 1e-8 * std::max(1.0, std::abs(expected)));
  }
}

TEST(LipContrastive, SilentFramesContributeNothing) {
  gen::Rng rng(53);
  const Matrix lip = gen::random_matrix(rng, 5, 3);
  const Matrix st = gen::random_matrix(rng, 5, 3);
  const std::vector<std::uint8_t> tau(5, 0);
  const std::vector<double> w(5, 1.0);
  EXPECT_EQ(lip_contrastive_loss(lip, st, tau, w, 0.1), 0.0);
  EXPECT_TRUE(lip_contrastive_grad(lip, st, tau, w, 0.1).isZero());
}

TEST(LipContrastive, LiteralFormIsConstantPerActiveFrame) {
  gen::Rng rng(54);
  const Matrix lip = gen::random_matrix(rng, 4, 3);
  const Matrix st = gen::random_matrix(rng, 4, 3);
  const std::vector<std::uint8_t> tau = {1, 0, 1, 1};
  const std::vector<double> w = {0.5, 1.0, 1.0, 0.25};
  EXPECT_NEAR(lip_contrastive_loss(lip, st, tau, w, 0.3, ContrastiveForm::kLiteral), 1.75 * std::log(4.0), 1e-12);
}

TEST(LipContrastive, GradientMatchesCentralDifferences) {
  gen::Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const int T = gen::uniform_int(rng, 1, 8);
    const int D = gen::uniform_int(rng, 1, 5);
    const Matrix lip = gen::random_matrix(rng, T, D);
    Matrix st = gen::random_matrix(rng, T, D);
    std::vector<std::uint8_t> tau(T);
    std::vector<double> w(T);
    for (int t = 0; t < T; ++t) {
      tau[t] = static_cast<std::uint8_t>(gen::uniform_int(rng, 0, 1));
      w[t] = gen::uniform(rng, 0.1, 1.0);
    }
    const double temp = gen::uniform(rng, 0.2, 2.0);
    const Matrix g = lip_contrastive_grad(lip, st, tau, w, temp);
    const double h = 1e-6;
    for (int r = 0; r < T; ++r) {
      for (int c = 0; c < D; ++c) {
        const double x = st(r, c);
        st(r, c) = x + h;
        const double up = oracle::contrastive_loss(lip, st, tau, w, temp);
        st(r, c) = x - h;
        const double dn = oracle::contrastive_loss(lip, st, tau, w, temp);
        st(r, c) = x;
        EXPECT_NEAR(g(r, c), (up - dn) / (2 * h), 1e-5 * std::max(1.0, std::abs(g(r, c))));
      }
    }
  }
}

TEST(LipContrastive, RejectsBadInputs) {
  const Matrix a = Matrix::Ones(2, 2);
  const Matrix b = Matrix::Ones(3, 2);
  const std::vector<std::uint8_t> tau = {1, 1};
  const std::vector<double> w = {1, 1};
  EXPECT_THROW(lip_contrastive_loss(a, b, tau, w, 1.0), Error);
  EXPECT_THROW(lip_contrastive_loss(a, a, tau, w, 0.0), Error);
  EXPECT_THROW(lip_contrastive_loss(a, a, std::vector<std::uint8_t>{1, 2}, w, 1.0), Error);
  EXPECT_THROW(lip_contrastive_loss(a, a, tau, std::vector<double>{1}, 1.0), Error);
}

TEST(LipMotionWeights, ClipsAtTheMedianMotion) {
  Matrix lip(5, 1);
  lip << 0, 1, 3, 6, 6;  // deltas 1, 2, 3, 0
  const auto w = lip_motion_weights(lip);
  ASSERT_EQ(w.size(), 5u);
  EXPECT_DOUBLE_EQ(w[1], 0.5);
  EXPECT_DOUBLE_EQ(w[2], 1.0);
  EXPECT_DOUBLE_EQ(w[3], 1.0);
  EXPECT_DOUBLE_EQ(w[4], 0.0);
  EXPECT_DOUBLE_EQ(w[0], w[1]);
}

TEST(LipMotionWeights, StaticLipsGiveZeroWeights) {
  EXPECT_EQ(lip_motion_weights(Matrix::Ones(4, 3)), std::vector<double>(4, 0.0));
  EXPECT_EQ(lip_motion_weights(Matrix::Ones(1, 3)), std::vector<double>(1, 0.0));
  EXPECT_THROW(lip_motion_weights(Matrix(0, 3)), Error);
}

TEST(LipMotionWeights, BoundedAndScaleInvariant) {
  gen::Rng rng(56);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix lip = gen::random_matrix(rng, gen::uniform_int(rng, 2, 20), 4);
    const auto w = lip_motion_weights(lip);
    const auto w2 = lip_motion_weights(lip * 7.5);
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_GE(w[i], 0.0);
      EXPECT_LE(w[i], 1.0);
      EXPECT_NEAR(w[i], w2[i], 1e-12);
    }
  }
}

TEST(RowNormalized, UnitRowsAndZeroRowsKept) {
  Matrix m(2, 2);
  m << 3, 4, 0, 0;
  const Matrix n = row_normalized(m);
  EXPECT_DOUBLE_EQ(n(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(n(0, 1), 0.8);
  EXPECT_TRUE(n.row(1).isZero());
}

}  // namespace
}  // namespace dubkit::align
