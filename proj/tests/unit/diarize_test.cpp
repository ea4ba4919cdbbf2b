// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>

#include "dubkit/diarize.hpp"
#include "dubkit/error.hpp"
#include "support/generators.hpp"

namespace dubkit::diarize {
namespace {

// Pair-counting form of the adjusted Rand index.
double ari_pairs(const std::vector<int>& x, const std::vector<int>& y) {
  double a = 0, b = 0, c = 0, d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const bool sx = x[i] == x[j];
      const bool sy = y[i] == y[j];
      (sx && sy ? a : sx ? b : sy ? c : d) += 1;
    }
  }
  const double den = (a + b) * (b + d) + (a + c) * (c + d);
  return den == 0 ? 1.0 : 2 * (a * d - b * c) / den;
}

// UPGMA recomputed from scratch each round.
std::vector<int> naive_average_linkage(const Matrix& aff, double threshold) {
  const auto n = static_cast<int>(aff.rows());
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double s = 0;
        for (int p : clusters[i]) {
          for (int q : clusters[j]) s += 1.0 - aff(p, q);
        }
        s /= static_cast<double>(clusters[i].size() * clusters[j].size());
        if (s < best) {
          best = s;
          bi = i;
          bj = j;
        }
      }
    }
    if (!(best < threshold)) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::vector<int> label(n);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (int p : clusters[c]) label[p] = static_cast<int>(c);
  }
  return label;
}

Matrix blobs(gen::Rng& rng, const std::vector<int>& truth, int dim, double noise) {
  Matrix centers = gen::random_matrix(rng, 8, dim, 1.0);
  Matrix x(static_cast<Eigen::Index>(truth.size()), dim);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = centers.row(truth[i]) + gen::random_matrix(rng, 1, dim, noise);
  }
  return x;
}

TEST(FaceNormalization, VisibleFramesCarryTheTrackIdentity) {
  Matrix track(4, 2);
  track << 3, 0, 0, 0, 0, 5, 2, 2;
  const auto out = normalize_face_embeddings(std::vector<Matrix>{track});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].available, (std::vector<bool>{true, false, true, true}));
  const double s = 1 + 1 / std::sqrt(2.0);
  RowVector id(2);
  id << s, s;
  id.normalize();
  EXPECT_TRUE(out[0].rows.row(0).isApprox(id));
  EXPECT_TRUE(out[0].rows.row(1).isZero());
  EXPECT_TRUE(out[0].rows.row(3).isApprox(id));
}

TEST(FaceNormalization, InvariantToPerFrameScale) {
  gen::Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix t = gen::random_matrix(rng, gen::uniform_int(rng, 1, 10), 5);
    Matrix scaled = t;
    for (Eigen::Index r = 0; r < t.rows(); ++r) scaled.row(r) *= gen::uniform(rng, 0.1, 10.0);
    const auto a = normalize_face_embeddings(std::vector<Matrix>{t});
    const auto b = normalize_face_embeddings(std::vector<Matrix>{scaled});
    EXPECT_TRUE(a[0].rows.isApprox(b[0].rows, 1e-9));
    for (Eigen::Index r = 0; r < t.rows(); ++r) EXPECT_NEAR(a[0].rows.row(r).norm(), 1.0, 1e-9);
  }
}

TEST(FaceNormalization, RejectsBadTracks) {
  EXPECT_THROW(normalize_face_embeddings(std::vector<Matrix>{Matrix(0, 3)}), Error);
  Matrix bad = Matrix::Ones(2, 2);
  bad(0, 0) = NAN;
  EXPECT_THROW(normalize_face_embeddings(std::vector<Matrix>{bad}), Error);
  const auto all_zero = normalize_face_embeddings(std::vector<Matrix>{Matrix::Zero(3, 2)});
  EXPECT_EQ(all_zero[0].available, std::vector<bool>(3, false));
}

TEST(ActiveSpeaker, HighestScoreWinsTiesToLowestId) {
  const AsdScores s = {{{2, 0.5}, {1, 0.9}}, {}, {{4, 0.3}, {3, 0.3}}};
  const auto sel = select_active_speaker(s);
  EXPECT_EQ(sel[0], 1);
  EXPECT_FALSE(sel[1].has_value());
  EXPECT_EQ(sel[2], 3);
}

TEST(ActiveSpeaker, ParsesScoreFiles) {
  const auto s = parse_asd_scores("# frame face score\n0 1 0.5\r\n\n2 0 -1.25\n0 3 0.75\n", 3);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].size(), 2u);
  EXPECT_TRUE(s[1].empty());
  EXPECT_DOUBLE_EQ(s[2][0].score, -1.25);
  auto line_of = [](std::string_view text) {
    try {
      parse_asd_scores(text, 3);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("0 1 0.5\n3 1 0.5\n"), 2u);
  EXPECT_EQ(line_of("0 1 abc\n"), 1u);
  EXPECT_EQ(line_of("0 1\n"), 1u);
  EXPECT_EQ(line_of("0 1 0.5 9\n"), 1u);
  EXPECT_EQ(line_of("0 1 nan\n"), 1u);
}

TEST(Affinity, CosineIsSymmetricWithUnitDiagonal) {
  gen::Rng rng(72);
  const Matrix x = gen::random_matrix(rng, 7, 4);
  const Matrix a = cosine_affinity(x);
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(a(i, i), 1.0);
    for (int j = 0; j < 7; ++j) {
      EXPECT_EQ(a(i, j), a(j, i));
      EXPECT_NEAR(a(i, j), x.row(i).dot(x.row(j)) / (x.row(i).norm() * x.row(j).norm()), 1e-12);
    }
  }
}

TEST(Affinity, FusionOnlyTouchesPairsWithBothFacesVisible) {
  Matrix audio = Matrix::Identity(3, 3);
  audio(0, 1) = audio(1, 0) = 0.2;
  audio(0, 2) = audio(2, 0) = 0.4;
  Matrix visual = Matrix::Identity(3, 3);
  visual(0, 1) = visual(1, 0) = 1.0;
  visual(0, 2) = visual(2, 0) = 1.0;
  const Matrix f = fuse_affinity(audio, visual, {true, true, false}, 0.5);
  EXPECT_DOUBLE_EQ(f(0, 1), 0.6);
  EXPECT_DOUBLE_EQ(f(0, 2), 0.4);
  EXPECT_EQ(fuse_affinity(audio, visual, {true, true, true}, 0.0), audio);
  EXPECT_THROW(fuse_affinity(audio, visual, {true, true}, 0.5), Error);
  EXPECT_THROW(fuse_affinity(audio, visual, {true, true, true}, 1.5), Error);
  Matrix asym = audio;
  asym(0, 1) = 0.9;
  EXPECT_THROW(fuse_affinity(asym, visual, {true, true, true}, 0.5), Error);
}

TEST(AdjustedRandIndex, MatchesPairCounting) {
  gen::Rng rng(73);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = gen::uniform_int(rng, 2, 25);
    std::vector<int> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = gen::uniform_int(rng, 0, 3);
      y[i] = gen::uniform_int(rng, 0, 3);
    }
    EXPECT_NEAR(adjusted_rand_index(x, y), ari_pairs(x, y), 1e-12);
    EXPECT_NEAR(adjusted_rand_index(x, x), 1.0, 1e-12);
    std::vector<int> renamed(n);
    for (int i = 0; i < n; ++i) renamed[i] = 10 - x[i];
    EXPECT_NEAR(adjusted_rand_index(x, renamed), 1.0, 1e-12);
  }
  EXPECT_THROW(adjusted_rand_index(std::vector<int>{1}, std::vector<int>{1, 2}), Error);
}

TEST(Clustering, AgglomerativeMatchesNaiveUpgma) {
  gen::Rng rng(74);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen::uniform_int(rng, 2, 14);
    const Matrix a = cosine_affinity(gen::random_matrix(rng, n, 3));
    const double th = gen::uniform(rng, 0.05, 1.5);
    const auto got = cluster_speakers(a, {th, 64, ClusterMethod::kAgglomerative});
    const auto want = naive_average_linkage(a, th);
    EXPECT_NEAR(adjusted_rand_index(got, want), 1.0, 1e-12);
    EXPECT_EQ(got[0], 0);
  }
}

TEST(Clustering, RecoversSeparatedSpeakers) {
  gen::Rng rng(75);
  for (auto method : {ClusterMethod::kAgglomerative, ClusterMethod::kSpectral}) {
    for (int trial = 0; trial < 30; ++trial) {
      const int k = gen::uniform_int(rng, 1, 4);
      std::vector<int> truth;
      for (int s = 0; s < k; ++s) {
        for (int r = gen::uniform_int(rng, 2, 6); r > 0; --r) truth.push_back(s);
      }
      Matrix x(static_cast<Eigen::Index>(truth.size()), 16);
      const Matrix centers = Matrix::Identity(16, 16);
      for (std::size_t i = 0; i < truth.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = centers.row(truth[i]) + gen::random_matrix(rng, 1, 16, 0.03);
      }
      const auto labels = cluster_speakers(cosine_affinity(x), {0.35, 8, method});
      EXPECT_NEAR(adjusted_rand_index(labels, truth), 1.0, 1e-12) << static_cast<int>(method) << " k=" << k;
    }
  }
}

TEST(Clustering, ThresholdExtremesAndSpeakerCap) {
  gen::Rng rng(76);
  const Matrix a = cosine_affinity(blobs(rng, {0, 1, 2, 3, 4, 5}, 8, 0.0));
  auto count = [](const std::vector<int>& l) { return *std::max_element(l.begin(), l.end()) + 1; };
  EXPECT_EQ(count(cluster_speakers(a, {0.0, 16})), 6);
  EXPECT_EQ(count(cluster_speakers(a, {2.1, 16})), 1);
  EXPECT_EQ(count(cluster_speakers(a, {0.0, 3})), 3);
  EXPECT_TRUE(cluster_speakers(Matrix(0, 0)).empty());
  EXPECT_EQ(cluster_speakers(Matrix::Ones(1, 1)), std::vector<int>{0});
  EXPECT_THROW(cluster_speakers(a, {0.3, 0}), Error);
}

TEST(Rttm, LabelsBecomeSegmentsAndMergeWithinGap) {
  const std::vector<int> labels = {0, 0, 1, 1};
  const std::vector<FrameInterval> segs = {{0, 10}, {12, 20}, {20, 25}, {40, 50}};
  const auto plain = labels_to_rttm(labels, segs, "c");
  ASSERT_EQ(plain.size(), 4u);
  EXPECT_EQ(plain[2].speaker, "spk1");
  EXPECT_DOUBLE_EQ(plain[1].onset, 0.48);
  EXPECT_DOUBLE_EQ(plain[1].duration, 0.32);
  const auto merged = labels_to_rttm(labels, segs, "c", {true, 2, 25});
  ASSERT_EQ(merged.size(), 3u);
  EXPECT_DOUBLE_EQ(merged[0].duration, 0.8);
  EXPECT_EQ(labels_to_rttm(labels, segs, "c", {true, 20, 25}).size(), 2u);
  EXPECT_THROW(labels_to_rttm(std::vector<int>{0}, segs, "c"), Error);
}

TEST(Pooling, MeansVisibleFramesPerSegment) {
  Matrix frames(6, 2);
  frames << 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 1;
  const std::vector<bool> avail = {true, true, true, false, false, false};
  const std::vector<FrameInterval> segs = {{0, 3}, {3, 6}, {5, 9}};
  const auto p = pool_segments(frames, avail, segs);
  RowVector expected(2);
  expected << 2, 1;
  expected.normalize();
  EXPECT_TRUE(p.rows.row(0).isApprox(expected));
  EXPECT_EQ(p.available, (std::vector<bool>{true, false, false}));
  EXPECT_TRUE(p.rows.row(1).isZero());
  EXPECT_THROW(pool_segments(frames, {true}, segs), Error);
}

}  // namespace
}  // namespace dubkit::diarize
