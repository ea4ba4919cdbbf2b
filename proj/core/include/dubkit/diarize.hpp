// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Audio-visual diarization post-processing over ingested embeddings and
// active-speaker-detection scores.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dubkit/formats.hpp"
#include "dubkit/matrix.hpp"
#include "dubkit/types.hpp"

namespace dubkit::diarize {

inline constexpr double kDefaultThreshold = 0.35;
inline constexpr double kDefaultVisualWeight = 0.3;

struct NormalizedTrack {
  Matrix rows;                 // the track identity on visible frames, zero elsewhere
  std::vector<bool> available;
};

/// One face track is one identity. Each visible row (non-zero, relative
/// tolerance 1e-9) is L2-normalized, the track's identity is the normalized
/// mean of those rows, and that identity is written to every visible frame.
/// All-zero rows are frames where the face is not visible.
std::vector<NormalizedTrack> normalize_face_embeddings(std::span<const Matrix> tracks);

struct FaceCandidate {
  int face_id = 0;
  double score = 0.0;
};

using AsdScores = std::vector<std::vector<FaceCandidate>>;  // per frame

/// Highest-scoring face per frame; ties go to the lowest face id.
std::vector<std::optional<int>> select_active_speaker(const AsdScores& scores);

/// Reads line-delimited "frame face_id score" records into per-frame
/// candidate lists covering frames [0, num_frames). Lines starting with '#'
/// are comments.
AsdScores parse_asd_scores(std::string_view text, std::size_t num_frames);

/// Cosine affinity of the rows of `embeddings` (rows normalized first).
Matrix cosine_affinity(const Matrix& embeddings);

/// (1 - beta) * audio + beta * visual where both rows have visual data,
/// audio elsewhere. Inputs must be symmetric with a unit diagonal.
Matrix fuse_affinity(const Matrix& audio, const Matrix& visual, const std::vector<bool>& available,
                     double beta = kDefaultVisualWeight);

enum class ClusterMethod { kAgglomerative, kSpectral };

struct ClusterOptions {
  double threshold = kDefaultThreshold;  // average-linkage stop distance (1 - affinity)
  int max_speakers = 16;
  ClusterMethod method = ClusterMethod::kAgglomerative;
};

/// Labels 0..K-1 in first-appearance order.
std::vector<int> cluster_speakers(const Matrix& affinity, const ClusterOptions& opts = {});

/// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

struct RttmOptions {
  bool merge_adjacent = false;
  std::int64_t max_merge_gap = 0;  // frames between segments that still merge
  int fps = kDefaultFps;
};

/// One SPEAKER line per segment labelled "spk<K>".
std::vector<formats::RttmSegment> labels_to_rttm(std::span<const int> labels,
                                                 std::span<const FrameInterval> segments,
                                                 std::string_view clip_id,
                                                 const RttmOptions& opts = {});

/// Mean of the available rows of `frames` inside each segment, re-normalized.
/// Segments without any available frame come back unavailable.
struct PooledEmbeddings {
  Matrix rows;
  std::vector<bool> available;
};

PooledEmbeddings pool_segments(const Matrix& frames, const std::vector<bool>& frame_available,
                               std::span<const FrameInterval> segments);

}  // namespace dubkit::diarize
