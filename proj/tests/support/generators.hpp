// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded random generators for property tests.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dubkit/formats.hpp"
#include "dubkit/manifest.hpp"
#include "dubkit/matrix.hpp"
#include "dubkit/types.hpp"

namespace gen {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi);  // inclusive
double uniform(Rng& rng, double lo, double hi);

dubkit::Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0);

/// Sorted, non-overlapping tuples with frames in [0, max_frame].
std::vector<dubkit::TimestampSpeakerTuple> tuples(Rng& rng, int max_segments, int max_speakers,
                                                  std::int64_t max_frame = 1500);

/// Sorted, disjoint, non-empty intervals inside [0, horizon).
std::vector<dubkit::FrameInterval> intervals(Rng& rng, int max_count, std::int64_t horizon);

/// Short UTF-8 text drawn from ASCII letters, CJK characters and spaces.
std::string text(Rng& rng, int max_len, bool allow_newlines = false);

std::vector<dubkit::formats::SrtCue> srt_cues(Rng& rng, int max_cues);
std::vector<dubkit::formats::RttmSegment> rttm_segments(Rng& rng, int max_segments);
dubkit::formats::SampleRecord record(Rng& rng, int index);

}  // namespace gen
