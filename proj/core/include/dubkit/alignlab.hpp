// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Reference scorers for the multimodal alignment objectives. Everything here
// works on caller-provided arrays, so the same code checks any training
// implementation against an exact value.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dubkit/matrix.hpp"

namespace dubkit::align {

inline constexpr std::int32_t kSpeechCodebookSize = 6560;
inline constexpr std::int32_t kSilentToken = 1;
inline constexpr double kProbEpsilon = 1e-7;

/// Throws dubkit::Error if any token is outside [0, 6560).
void validate_speech_tokens(std::span<const std::int32_t> tokens);

/// tau[t] = 1 iff tokens[t] is not the silent token.
std::vector<std::uint8_t> voice_activity(std::span<const std::int32_t> tokens);

enum class Reduction { kSum, kMean };

/// Binary cross-entropy between ground-truth activity and predicted
/// probabilities (clamped to [eps, 1-eps]). Summed over frames by default.
double va_loss(std::span<const std::uint8_t> tau, std::span<const double> tau_hat,
               Reduction reduction = Reduction::kSum);

/// Mean negative log-likelihood of `targets` under row-wise log-probabilities.
/// Rows must be normalized (|logsumexp| <= 1e-6). The terminal token is part
/// of `targets`, so a T-token utterance supplies T+1 rows.
double speech_token_loss(const Matrix& logprobs, std::span<const std::int32_t> targets);

// Taken literally, the objective sums exp(<lip_t, st_t>) over a dummy index
// in the denominator, which makes the loss constant (log T per frame).
// kInfoNce lets the denominator run over the speech-token index; kLiteral
// keeps the constant form.
enum class ContrastiveForm { kInfoNce, kLiteral };

/// -sum_t tau_t w_t log softmax_s(<lip_t, st_s> / temperature)[s = t].
double lip_contrastive_loss(const Matrix& lip, const Matrix& st, std::span<const std::uint8_t> tau,
                            std::span<const double> w, double temperature,
                            ContrastiveForm form = ContrastiveForm::kInfoNce);

/// Gradient of the kInfoNce loss with respect to `st` (T x D).
Matrix lip_contrastive_grad(const Matrix& lip, const Matrix& st, std::span<const std::uint8_t> tau,
                            std::span<const double> w, double temperature);

/// w_t = min(1, |lip_t - lip_{t-1}| / rho), rho the median of the non-zero
/// frame deltas; w_0 copies w_1. No motion anywhere gives all zeros.
std::vector<double> lip_motion_weights(const Matrix& lip);

/// Rows scaled to unit L2 norm; zero rows stay zero.
Matrix row_normalized(const Matrix& m);

}  // namespace dubkit::align
