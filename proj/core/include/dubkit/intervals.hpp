// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "dubkit/types.hpp"

namespace dubkit {

/// Sorted, pairwise-disjoint set of half-open frame intervals.
class IntervalSet {
 public:
  IntervalSet() = default;

  /// Sorts, drops empty intervals and merges overlapping or touching ones.
  static IntervalSet normalized(std::vector<FrameInterval> intervals);
  /// Throws dubkit::Error unless the input is already sorted and disjoint.
  static IntervalSet from_sorted(std::vector<FrameInterval> intervals);

  const std::vector<FrameInterval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::int64_t total_length() const;

  /// Number of frames of this set inside `window`.
  std::int64_t overlap_length(FrameInterval window) const;
  bool intersects(FrameInterval window) const { return overlap_length(window) > 0; }
  IntervalSet clipped(FrameInterval window) const;

  bool operator==(const IntervalSet&) const = default;

 private:
  std::vector<FrameInterval> intervals_;
};

}  // namespace dubkit
