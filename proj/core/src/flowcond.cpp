// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/flowcond.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dubkit/alignlab.hpp"
#include "dubkit/error.hpp"

namespace dubkit::flow {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                std::to_string(b.cols()) + ")");
  }
}

// Uniform in [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

Matrix ot_interpolate(const Matrix& y0, const Matrix& y1, double u) {
  require_same_shape(y0, y1, "ot_interpolate");
  if (!(u >= 0.0 && u <= 1.0)) throw Error("ot_interpolate: u must lie in [0, 1]");
  if (u == 0.0) return y0;
  if (u == 1.0) return y1;
  return (1.0 - u) * y0 + u * y1;
}

Matrix cfm_target(const Matrix& y0, const Matrix& y1) {
  require_same_shape(y0, y1, "cfm_target");
  return y1 - y0;
}

double cfm_loss(const Matrix& pred, const Matrix& y0, const Matrix& y1, Reduction reduction) {
  require_same_shape(pred, y0, "cfm_loss");
  const Matrix target = cfm_target(y0, y1);
  const double sum = (pred - target).squaredNorm();
  if (reduction == Reduction::kSum || pred.size() == 0) return sum;
  return sum / static_cast<double>(pred.size());
}

Matrix cfg_combine(const Matrix& v_cond, const Matrix& v_uncond, double scale) {
  require_same_shape(v_cond, v_uncond, "cfg_combine");
  if (!(scale >= 0.0)) throw Error("cfg_combine: scale must be >= 0");
  if (scale == 0.0) return v_cond;
  return (1.0 + scale) * v_cond - scale * v_uncond;
}

std::vector<bool> cfg_drop_mask(std::size_t batch, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("cfg_drop_mask: p must lie in [0, 1]");
  std::mt19937_64 gen(seed);
  std::vector<bool> mask(batch);
  for (std::size_t i = 0; i < batch; ++i) mask[i] = uniform01(gen) < p;
  return mask;
}

FlowSample make_flow_sample(const Matrix& data, const Matrix& noise, double u, NoiseEndpoint noise_at) {
  require_same_shape(data, noise, "make_flow_sample");
  const Matrix& y0 = noise_at == NoiseEndpoint::kY1 ? data : noise;
  const Matrix& y1 = noise_at == NoiseEndpoint::kY1 ? noise : data;
  return {ot_interpolate(y0, y1, u), cfm_target(y0, y1)};
}

Matrix gaussian_noise(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Matrix m(rows, cols);
  const Eigen::Index n = m.size();
  for (Eigen::Index i = 0; i < n; i += 2) {
    const double u1 = 1.0 - uniform01(gen);  // (0, 1]
    const double u2 = uniform01(gen);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    m.data()[i] = r * std::cos(theta);
    if (i + 1 < n) m.data()[i + 1] = r * std::sin(theta);
  }
  return m;
}

ConditioningPlan build_ssc_plan(std::span<const std::int32_t> tokens,
                                const std::vector<TimestampSpeakerTuple>& tuples,
                                std::int64_t neighborhood) {
  validate_tuples(tuples);
  if (neighborhood < 0) throw Error("build_ssc_plan: neighborhood must be >= 0");
  const auto T = static_cast<std::int64_t>(tokens.size());
  auto silent = [&](std::int64_t i) { return tokens[static_cast<std::size_t>(i)] == align::kSilentToken; };

  ConditioningPlan plan;
  plan.token_length = T;
  std::int64_t prev_end = 0;
  for (const auto& t : tuples) {
    if (t.end > T) {
      throw Error("build_ssc_plan: tuple [" + std::to_string(t.start) + ", " + std::to_string(t.end) +
                  ") extends beyond " + std::to_string(T) + " tokens");
    }
    // Forward: speech onset inside the tuple.
    std::int64_t onset = t.start;
    while (onset < t.end && silent(onset)) ++onset;
    if (onset == t.end) onset = t.start;
    // Backward: nearest silent token before the onset.
    const std::int64_t floor = std::max(onset - neighborhood, prev_end);
    std::int64_t position = onset;
    for (std::int64_t i = onset - 1; i >= floor; --i) {
      if (silent(i)) {
        position = i + 1;
        break;
      }
    }
    plan.insertions.push_back({position, t.spk});
    prev_end = t.end;
  }
  return plan;
}

SpeakerEmbeddingTable::SpeakerEmbeddingTable(const Matrix& rows, std::vector<int> speakers)
    : rows_(rows), speakers_(std::move(speakers)) {
  if (static_cast<Eigen::Index>(speakers_.size()) != rows_.rows()) {
    throw Error("speaker table: one speaker id per row required");
  }
  if (!rows_.allFinite()) throw Error("speaker table: non-finite entries");
  for (Eigen::Index r = 0; r < rows_.rows(); ++r) {
    const double n = rows_.row(r).norm();
    if (n == 0) throw Error("speaker table: zero embedding row");
    rows_.row(r) /= n;
  }
  auto sorted = speakers_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("speaker table: duplicate speaker id");
  }
}

SpeakerEmbeddingTable::SpeakerEmbeddingTable(const Matrix& rows)
    : SpeakerEmbeddingTable(rows, [&] {
        std::vector<int> ids(static_cast<std::size_t>(rows.rows()));
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
        return ids;
      }()) {}

std::optional<Eigen::Index> SpeakerEmbeddingTable::row_of(int spk) const {
  const auto it = std::find(speakers_.begin(), speakers_.end(), spk);
  if (it == speakers_.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - speakers_.begin());
}

Matrix assemble_conditioning(const ConditioningPlan& plan, const Matrix& token_embeddings,
                             const SpeakerEmbeddingTable& speakers) {
  const auto T = token_embeddings.rows();
  if (plan.token_length != T) throw Error("assemble_conditioning: plan built for a different length");
  if (!plan.insertions.empty() && speakers.dim() != token_embeddings.cols()) {
    throw Error("assemble_conditioning: speaker and token embedding widths differ");
  }
  const auto N = static_cast<Eigen::Index>(plan.insertions.size());
  Matrix out(T + N, token_embeddings.cols());
  Eigen::Index src = 0;
  Eigen::Index dst = 0;
  std::int64_t prev = -1;
  for (const auto& ins : plan.insertions) {
    if (ins.position <= prev || ins.position < 0 || ins.position > T) {
      throw Error("assemble_conditioning: insertion positions must increase within [0, T]");
    }
    const auto row = speakers.row_of(ins.spk);
    if (!row) throw Error("assemble_conditioning: speaker " + std::to_string(ins.spk) + " not in table");
    const auto take = static_cast<Eigen::Index>(ins.position) - src;
    out.middleRows(dst, take) = token_embeddings.middleRows(src, take);
    dst += take;
    src += take;
    out.row(dst++) = speakers.rows().row(*row);
    prev = ins.position;
  }
  out.middleRows(dst, T - src) = token_embeddings.middleRows(src, T - src);
  return out;
}

Matrix unsplice_conditioning(const ConditioningPlan& plan, const Matrix& conditioned) {
  const auto N = static_cast<Eigen::Index>(plan.insertions.size());
  if (conditioned.rows() != plan.token_length + N) {
    throw Error("unsplice_conditioning: row count does not match the plan");
  }
  Matrix out(plan.token_length, conditioned.cols());
  Eigen::Index src = 0;
  Eigen::Index dst = 0;
  for (const auto& ins : plan.insertions) {
    const auto take = static_cast<Eigen::Index>(ins.position) - dst;
    if (take < 0) throw Error("unsplice_conditioning: insertion positions must increase");
    out.middleRows(dst, take) = conditioned.middleRows(src, take);
    dst += take;
    src += take + 1;
  }
  out.middleRows(dst, plan.token_length - dst) = conditioned.middleRows(src, plan.token_length - dst);
  return out;
}

}  // namespace dubkit::flow
