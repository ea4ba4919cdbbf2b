// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "dubkit/error.hpp"
#include "dubkit/intervals.hpp"
#include "support/generators.hpp"

namespace dubkit {
namespace {

std::set<std::int64_t> cover(const std::vector<FrameInterval>& v) {
  std::set<std::int64_t> s;
  for (const auto& i : v) {
    for (auto f = i.start; f < i.end; ++f) s.insert(f);
  }
  return s;
}

TEST(IntervalSet, NormalizedMergesTouchingAndOverlapping) {
  const auto s = IntervalSet::normalized({{5, 8}, {0, 2}, {2, 3}, {7, 10}, {4, 4}});
  EXPECT_EQ(s.intervals(), (std::vector<FrameInterval>{{0, 3}, {5, 10}}));
  EXPECT_EQ(s.total_length(), 8);
}

TEST(IntervalSet, FromSortedValidates) {
  EXPECT_NO_THROW(IntervalSet::from_sorted({{0, 2}, {2, 4}}));
  EXPECT_THROW(IntervalSet::from_sorted({{0, 3}, {2, 4}}), Error);
  EXPECT_THROW(IntervalSet::from_sorted({{1, 1}}), Error);
}

TEST(IntervalSet, MatchesFrameSetOracle) {
  gen::Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<FrameInterval> raw;
    const int n = gen::uniform_int(rng, 0, 8);
    for (int k = 0; k < n; ++k) {
      const auto a = gen::uniform_int(rng, 0, 60);
      raw.push_back({a, a + gen::uniform_int(rng, 0, 12)});
    }
    const auto frames = cover(raw);
    const auto set = IntervalSet::normalized(raw);
    EXPECT_EQ(cover(set.intervals()), frames);
    EXPECT_EQ(set.total_length(), static_cast<std::int64_t>(frames.size()));
    for (std::size_t i = 1; i < set.intervals().size(); ++i) {
      EXPECT_LT(set.intervals()[i - 1].end, set.intervals()[i].start);
    }

    const auto ws = gen::uniform_int(rng, -5, 70);
    const FrameInterval window{ws, ws + gen::uniform_int(rng, 0, 20)};
    const auto expected = std::count_if(frames.begin(), frames.end(),
                                        [&](std::int64_t f) { return f >= window.start && f < window.end; });
    EXPECT_EQ(set.overlap_length(window), expected);
    EXPECT_EQ(set.intersects(window), expected > 0);
    EXPECT_EQ(set.clipped(window).total_length(), expected);
  }
}

}  // namespace
}  // namespace dubkit
