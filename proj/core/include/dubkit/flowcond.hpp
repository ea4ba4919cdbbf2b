// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Conditional flow-matching arithmetic and speaker-switching conditioning.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dubkit/matrix.hpp"
#include "dubkit/types.hpp"

namespace dubkit::flow {

inline constexpr std::int64_t kDefaultNeighborhood = 25;  // frames, 1 s at 25 Hz

/// (1 - u) * y0 + u * y1, elementwise.
Matrix ot_interpolate(const Matrix& y0, const Matrix& y1, double u);

/// Regression target y1 - y0.
Matrix cfm_target(const Matrix& y0, const Matrix& y1);

enum class Reduction { kMean, kSum };

/// Squared error between `pred` and cfm_target(y0, y1); mean over elements by default.
double cfm_loss(const Matrix& pred, const Matrix& y0, const Matrix& y1,
                Reduction reduction = Reduction::kMean);

/// Guided velocity (1 + scale) * v_cond - scale * v_uncond.
Matrix cfg_combine(const Matrix& v_cond, const Matrix& v_uncond, double scale);

/// Per-item "drop the conditioning" flags, each true with probability p.
/// Reproducible across platforms for a given seed.
std::vector<bool> cfg_drop_mask(std::size_t batch, double p, std::uint64_t seed);

/// Which endpoint of the path carries the Gaussian noise. The training
/// objective writes Y_1 ~ N(0, I) with target Y_1 - Y_0, so kY1 reproduces it
/// symbol for symbol; kY0 is the noise-to-data convention.
enum class NoiseEndpoint { kY1, kY0 };

struct FlowSample {
  Matrix y_u;
  Matrix target;
};

FlowSample make_flow_sample(const Matrix& data, const Matrix& noise, double u,
                            NoiseEndpoint noise_at = NoiseEndpoint::kY1);

/// Standard normal matrix from a seeded Mersenne twister (Box-Muller).
Matrix gaussian_noise(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// Places one speaker insertion per tuple.
///
/// For each tuple the onset is the first non-silent token in [start, end)
/// (start itself when the tuple is all silence). The backward search from
/// the onset covers at most `neighborhood` frames and never reaches into the
/// previous tuple; the insertion goes right after the last silent token it
/// finds, or at the onset when there is none.
ConditioningPlan build_ssc_plan(std::span<const std::int32_t> tokens,
                                const std::vector<TimestampSpeakerTuple>& tuples,
                                std::int64_t neighborhood = kDefaultNeighborhood);

/// One L2-normalized embedding row per reference speaker.
class SpeakerEmbeddingTable {
 public:
  SpeakerEmbeddingTable() = default;
  /// Row i belongs to speaker `speakers[i]`; rows are normalized on construction.
  SpeakerEmbeddingTable(const Matrix& rows, std::vector<int> speakers);
  /// Row i belongs to speaker i.
  explicit SpeakerEmbeddingTable(const Matrix& rows);

  std::optional<Eigen::Index> row_of(int spk) const;
  const Matrix& rows() const { return rows_; }
  Eigen::Index dim() const { return rows_.cols(); }

 private:
  Matrix rows_;
  std::vector<int> speakers_;
};

/// Splices the speaker rows into the token embedding sequence at the plan's
/// positions; the result has T + N rows.
Matrix assemble_conditioning(const ConditioningPlan& plan, const Matrix& token_embeddings,
                             const SpeakerEmbeddingTable& speakers);

/// Drops the rows assemble_conditioning inserted for `plan`.
Matrix unsplice_conditioning(const ConditioningPlan& plan, const Matrix& conditioned);

}  // namespace dubkit::flow
