// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/alignlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dubkit/error.hpp"

namespace dubkit::align {
namespace {

void check_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) throw Error(std::string(name) + " has non-finite entries");
}

void check_contrastive_inputs(const Matrix& lip, const Matrix& st, std::span<const std::uint8_t> tau,
                              std::span<const double> w, double temperature) {
  if (lip.rows() != st.rows() || lip.cols() != st.cols()) {
    throw Error("lip and speech-token embeddings must have the same shape");
  }
  const auto T = static_cast<std::size_t>(lip.rows());
  if (tau.size() != T || w.size() != T) throw Error("tau and w must have one entry per frame");
  if (!(temperature > 0) || !std::isfinite(temperature)) throw Error("temperature must be > 0");
  check_finite(lip, "lip embeddings");
  check_finite(st, "speech-token embeddings");
  for (std::size_t t = 0; t < T; ++t) {
    if (tau[t] > 1) throw Error("tau must be binary");
    if (!std::isfinite(w[t])) throw Error("w has non-finite entries");
  }
}

// Row-wise softmax of the scaled similarity matrix and its log-normalizers.
Matrix similarity(const Matrix& lip, const Matrix& st, double temperature) {
  return (lip * st.transpose()) / temperature;
}

Vector row_logsumexp(const Matrix& s) {
  Vector out(s.rows());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const double m = s.row(r).maxCoeff();
    out(r) = m + std::log((s.row(r).array() - m).exp().sum());
  }
  return out;
}

}  // namespace

void validate_speech_tokens(std::span<const std::int32_t> tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] < 0 || tokens[i] >= kSpeechCodebookSize) {
      throw Error("speech token " + std::to_string(tokens[i]) + " at " + std::to_string(i) +
                  " outside the codebook");
    }
  }
}

std::vector<std::uint8_t> voice_activity(std::span<const std::int32_t> tokens) {
  std::vector<std::uint8_t> tau(tokens.size());
  std::transform(tokens.begin(), tokens.end(), tau.begin(),
                 [](std::int32_t x) { return static_cast<std::uint8_t>(x != kSilentToken); });
  return tau;
}

double va_loss(std::span<const std::uint8_t> tau, std::span<const double> tau_hat, Reduction reduction) {
  if (tau.size() != tau_hat.size()) throw Error("va_loss: length mismatch");
  double loss = 0.0;
  for (std::size_t t = 0; t < tau.size(); ++t) {
    if (tau[t] > 1) throw Error("va_loss: tau must be binary");
    if (std::isnan(tau_hat[t])) throw Error("va_loss: NaN probability");
    const double p = std::clamp(tau_hat[t], kProbEpsilon, 1.0 - kProbEpsilon);
    loss -= tau[t] ? std::log(p) : std::log1p(-p);
  }
  if (reduction == Reduction::kMean && !tau.empty()) loss /= static_cast<double>(tau.size());
  return loss;
}

double speech_token_loss(const Matrix& logprobs, std::span<const std::int32_t> targets) {
  if (static_cast<std::size_t>(logprobs.rows()) != targets.size()) {
    throw Error("speech_token_loss: need one row per target (T+1 including the terminal token)");
  }
  if (targets.empty()) throw Error("speech_token_loss: empty target sequence");
  if (logprobs.array().isNaN().any() || (logprobs.array() == std::numeric_limits<double>::infinity()).any()) {
    throw Error("speech_token_loss: log-probabilities must be < +inf and not NaN");
  }
  const Vector lse = row_logsumexp(logprobs);
  double nll = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (std::abs(lse(static_cast<Eigen::Index>(t))) > 1e-6) {
      throw Error("speech_token_loss: row " + std::to_string(t) + " is not log-normalized");
    }
    if (targets[t] < 0 || targets[t] >= logprobs.cols()) {
      throw Error("speech_token_loss: target outside the vocabulary");
    }
    nll -= logprobs(static_cast<Eigen::Index>(t), targets[t]);
  }
  return nll / static_cast<double>(targets.size());
}

double lip_contrastive_loss(const Matrix& lip, const Matrix& st, std::span<const std::uint8_t> tau,
                            std::span<const double> w, double temperature, ContrastiveForm form) {
  check_contrastive_inputs(lip, st, tau, w, temperature);
  const auto T = lip.rows();
  if (T == 0) return 0.0;
  double loss = 0.0;
  if (form == ContrastiveForm::kLiteral) {
    // log(exp(x) / (T exp(x))) = -log T for every frame.
    for (Eigen::Index t = 0; t < T; ++t) loss += tau[t] * w[t] * std::log(static_cast<double>(T));
    return loss;
  }
  const Matrix s = similarity(lip, st, temperature);
  const Vector lse = row_logsumexp(s);
  for (Eigen::Index t = 0; t < T; ++t) {
    const double a = tau[t] * w[t];
    if (a != 0.0) loss -= a * (s(t, t) - lse(t));
  }
  return loss;
}

Matrix lip_contrastive_grad(const Matrix& lip, const Matrix& st, std::span<const std::uint8_t> tau,
                            std::span<const double> w, double temperature) {
  check_contrastive_inputs(lip, st, tau, w, temperature);
  const auto T = lip.rows();
  Matrix grad = Matrix::Zero(T, st.cols());
  if (T == 0) return grad;
  const Matrix s = similarity(lip, st, temperature);
  const Vector lse = row_logsumexp(s);
  // dL/dst_s = (1/temp) * sum_t a_t (p_ts - [s == t]) lip_t
  for (Eigen::Index t = 0; t < T; ++t) {
    const double a = tau[t] * w[t];
    if (a == 0.0) continue;
    for (Eigen::Index k = 0; k < T; ++k) {
      const double p = std::exp(s(t, k) - lse(t));
      const double coeff = a * (p - (k == t ? 1.0 : 0.0)) / temperature;
      grad.row(k) += coeff * lip.row(t);
    }
  }
  return grad;
}

std::vector<double> lip_motion_weights(const Matrix& lip) {
  const auto T = lip.rows();
  if (T < 1) throw Error("lip_motion_weights: need at least one frame");
  check_finite(lip, "lip embeddings");
  std::vector<double> delta(static_cast<std::size_t>(T), 0.0);
  std::vector<double> nonzero;
  for (Eigen::Index t = 1; t < T; ++t) {
    delta[t] = (lip.row(t) - lip.row(t - 1)).norm();
    if (delta[t] > 0) nonzero.push_back(delta[t]);
  }
  std::vector<double> w(static_cast<std::size_t>(T), 0.0);
  if (nonzero.empty()) return w;
  std::sort(nonzero.begin(), nonzero.end());
  const std::size_t n = nonzero.size();
  const double rho = n % 2 ? nonzero[n / 2] : 0.5 * (nonzero[n / 2 - 1] + nonzero[n / 2]);
  for (Eigen::Index t = 1; t < T; ++t) w[t] = std::min(1.0, delta[t] / rho);
  w[0] = w[1];
  return w;
}

Matrix row_normalized(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double n = out.row(r).norm();
    if (n > 0) out.row(r) /= n;
  }
  return out;
}

}  // namespace dubkit::align
