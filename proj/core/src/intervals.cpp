// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/intervals.hpp"

#include <algorithm>

#include "dubkit/error.hpp"

namespace dubkit {

IntervalSet IntervalSet::normalized(std::vector<FrameInterval> intervals) {
  std::erase_if(intervals, [](const FrameInterval& i) { return i.empty(); });
  std::sort(intervals.begin(), intervals.end(),
            [](const auto& a, const auto& b) { return a.start < b.start || (a.start == b.start && a.end < b.end); });
  IntervalSet out;
  for (const auto& i : intervals) {
    if (!out.intervals_.empty() && i.start <= out.intervals_.back().end) {
      out.intervals_.back().end = std::max(out.intervals_.back().end, i.end);
    } else {
      out.intervals_.push_back(i);
    }
  }
  return out;
}

IntervalSet IntervalSet::from_sorted(std::vector<FrameInterval> intervals) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].empty()) throw Error("empty interval in interval set");
    if (i > 0 && intervals[i].start < intervals[i - 1].end) {
      throw Error("interval set must be sorted and pairwise disjoint");
    }
  }
  IntervalSet out;
  out.intervals_ = std::move(intervals);
  return out;
}

std::int64_t IntervalSet::total_length() const {
  std::int64_t n = 0;
  for (const auto& i : intervals_) n += i.length();
  return n;
}

std::int64_t IntervalSet::overlap_length(FrameInterval window) const {
  std::int64_t n = 0;
  auto it = std::lower_bound(intervals_.begin(), intervals_.end(), window.start,
                             [](const FrameInterval& i, std::int64_t s) { return i.end <= s; });
  for (; it != intervals_.end() && it->start < window.end; ++it) {
    n += std::max<std::int64_t>(0, std::min(it->end, window.end) - std::max(it->start, window.start));
  }
  return n;
}

IntervalSet IntervalSet::clipped(FrameInterval window) const {
  IntervalSet out;
  for (const auto& i : intervals_) {
    FrameInterval c{std::max(i.start, window.start), std::min(i.end, window.end)};
    if (!c.empty()) out.intervals_.push_back(c);
  }
  return out;
}

}  // namespace dubkit
