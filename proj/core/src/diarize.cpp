// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/diarize.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "dubkit/error.hpp"

namespace dubkit::diarize {
namespace {

constexpr double kSymmetryTol = 1e-9;

void check_affinity(const Matrix& a, const char* name) {
  if (a.rows() != a.cols()) throw Error(std::string(name) + " affinity must be square");
  if (!a.allFinite()) throw Error(std::string(name) + " affinity has non-finite entries");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (std::abs(a(i, i) - 1.0) > kSymmetryTol) {
      throw Error(std::string(name) + " affinity must have a unit diagonal");
    }
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > kSymmetryTol) {
        throw Error(std::string(name) + " affinity must be symmetric");
      }
    }
  }
}

std::vector<int> dense_first_appearance(const std::vector<int>& raw) {
  std::map<int, int> remap;
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = remap.emplace(raw[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

// Average linkage over distance 1 - A. Clusters live in the slot of their
// lowest member, so ties resolve by item order.
std::vector<int> agglomerative(const Matrix& affinity, double threshold, int max_speakers) {
  const auto n = static_cast<std::size_t>(affinity.rows());
  Matrix dist = Matrix::Ones(affinity.rows(), affinity.cols()) - affinity;
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> size(n, 1);
  std::vector<int> owner(n);
  std::iota(owner.begin(), owner.end(), 0);
  std::size_t clusters = n;

  auto merge = [&](std::size_t i, std::size_t j) {  // j folds into i
    const double wi = static_cast<double>(size[i]);
    const double wj = static_cast<double>(size[j]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == i || k == j) continue;
      const double d = (wi * dist(i, k) + wj * dist(j, k)) / (wi + wj);
      dist(i, k) = d;
      dist(k, i) = d;
    }
    size[i] += size[j];
    alive[j] = false;
    for (auto& o : owner) {
      if (o == static_cast<int>(j)) o = static_cast<int>(i);
    }
    --clusters;
  };

  while (clusters > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (alive[j] && dist(i, j) < best) {
          best = dist(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (!(best < threshold)) break;
    merge(bi, bj);
  }

  // Too many clusters: fold the smallest one into its nearest neighbour.
  while (clusters > static_cast<std::size_t>(std::max(1, max_speakers))) {
    std::size_t small = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (alive[i] && (small == n || size[i] < size[small])) small = i;
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t partner = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (alive[k] && k != small && dist(small, k) < best) {
        best = dist(small, k);
        partner = k;
      }
    }
    merge(std::min(small, partner), std::max(small, partner));
  }
  return dense_first_appearance(owner);
}

std::vector<int> kmeans(const Matrix& x, int k) {
  const auto n = x.rows();
  // Deterministic farthest-point seeding from row 0.
  std::vector<Eigen::Index> seeds{0};
  while (static_cast<int>(seeds.size()) < k) {
    Eigen::Index far = 0;
    double far_d = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (auto s : seeds) d = std::min(d, (x.row(i) - x.row(s)).squaredNorm());
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    seeds.push_back(far);
  }
  Matrix centers(k, x.cols());
  for (int c = 0; c < k; ++c) centers.row(c) = x.row(seeds[static_cast<std::size_t>(c)]);
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (int c = 0; c < k; ++c) {
      RowVector sum = RowVector::Zero(x.cols());
      int count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (assign[static_cast<std::size_t>(i)] == c) {
          sum += x.row(i);
          ++count;
        }
      }
      if (count > 0) centers.row(c) = sum / count;
    }
  }
  return assign;
}

// Normalized-Laplacian embedding; cluster count from the largest eigengap.
std::vector<int> spectral(const Matrix& affinity, int max_speakers) {
  const auto n = affinity.rows();
  Matrix a = affinity.cwiseMax(0.0);
  const Vector deg = a.rowwise().sum();
  Vector inv_sqrt = deg.cwiseSqrt().cwiseInverse();
  Matrix lap = Matrix::Identity(n, n) - inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(lap);
  const Vector& ev = solver.eigenvalues();
  const int kmax = static_cast<int>(std::min<Eigen::Index>(std::max(1, max_speakers), n - 1));
  int k = 1;
  double gap = -1;
  for (int c = 1; c <= kmax; ++c) {
    const double g = ev(c) - ev(c - 1);
    if (g > gap) {
      gap = g;
      k = c;
    }
  }
  Matrix emb = solver.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = emb.row(i).norm();
    if (norm > 0) emb.row(i) /= norm;
  }
  return dense_first_appearance(kmeans(emb, k));
}

double choose2(double x) { return x * (x - 1) / 2; }

}  // namespace

std::vector<NormalizedTrack> normalize_face_embeddings(std::span<const Matrix> tracks) {
  std::vector<NormalizedTrack> out;
  out.reserve(tracks.size());
  for (const auto& track : tracks) {
    if (track.rows() == 0) throw Error("normalize_face_embeddings: empty track");
    if (!track.allFinite()) throw Error("normalize_face_embeddings: non-finite entries");
    const double scale = std::max(1.0, track.rowwise().norm().maxCoeff());
    NormalizedTrack nt{Matrix::Zero(track.rows(), track.cols()),
                       std::vector<bool>(static_cast<std::size_t>(track.rows()), false)};
    RowVector sum = RowVector::Zero(track.cols());
    for (Eigen::Index r = 0; r < track.rows(); ++r) {
      const double norm = track.row(r).norm();
      if (norm > 1e-9 * scale) {
        sum += track.row(r) / norm;
        nt.available[static_cast<std::size_t>(r)] = true;
      }
    }
    const double sum_norm = sum.norm();
    if (sum_norm > 0) {
      const RowVector identity = sum / sum_norm;
      for (Eigen::Index r = 0; r < track.rows(); ++r) {
        if (nt.available[static_cast<std::size_t>(r)]) nt.rows.row(r) = identity;
      }
    } else {
      std::fill(nt.available.begin(), nt.available.end(), false);
    }
    out.push_back(std::move(nt));
  }
  return out;
}

std::vector<std::optional<int>> select_active_speaker(const AsdScores& scores) {
  std::vector<std::optional<int>> out(scores.size());
  for (std::size_t f = 0; f < scores.size(); ++f) {
    const FaceCandidate* best = nullptr;
    for (const auto& c : scores[f]) {
      if (!std::isfinite(c.score)) throw Error("select_active_speaker: non-finite score");
      if (!best || c.score > best->score || (c.score == best->score && c.face_id < best->face_id)) {
        best = &c;
      }
    }
    if (best) out[f] = best->face_id;
  }
  return out;
}

AsdScores parse_asd_scores(std::string_view text, std::size_t num_frames) {
  AsdScores scores(num_frames);
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long frame = -1;
    int face = 0;
    std::string score_text, rest;
    if (!(fields >> frame >> face >> score_text) || (fields >> rest)) {
      throw ParseError(line_no, "expected 'frame face_id score'");
    }
    double score = 0;
    auto [p, ec] = std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
    if (ec != std::errc() || p != score_text.data() + score_text.size() || !std::isfinite(score)) {
      throw ParseError(line_no, "score must be a finite number");
    }
    if (frame < 0 || static_cast<std::size_t>(frame) >= num_frames) {
      throw ParseError(line_no, "frame index outside the clip");
    }
    scores[static_cast<std::size_t>(frame)].push_back({face, score});
  }
  return scores;
}

Matrix cosine_affinity(const Matrix& embeddings) {
  Matrix x = embeddings;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double n = x.row(r).norm();
    if (n > 0) x.row(r) /= n;
  }
  Matrix a = x * x.transpose();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    a(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      const double v = std::clamp(a(i, j), -1.0, 1.0);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

Matrix fuse_affinity(const Matrix& audio, const Matrix& visual, const std::vector<bool>& available,
                     double beta) {
  check_affinity(audio, "audio");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("fuse_affinity: beta must lie in [0, 1]");
  if (beta == 0.0) return audio;
  check_affinity(visual, "visual");
  const auto n = audio.rows();
  if (visual.rows() != n || static_cast<Eigen::Index>(available.size()) != n) {
    throw Error("fuse_affinity: size mismatch");
  }
  Matrix out = audio;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (available[static_cast<std::size_t>(i)] && available[static_cast<std::size_t>(j)]) {
        const double v = (1.0 - beta) * audio(i, j) + beta * visual(i, j);
        out(i, j) = v;
        out(j, i) = v;
      }
    }
  }
  return out;
}

std::vector<int> cluster_speakers(const Matrix& affinity, const ClusterOptions& opts) {
  if (affinity.rows() == 0) return {};
  check_affinity(affinity, "input");
  if (opts.max_speakers < 1) throw Error("cluster_speakers: max_speakers must be >= 1");
  if (affinity.rows() == 1) return {0};
  if (opts.method == ClusterMethod::kSpectral) return spectral(affinity, opts.max_speakers);
  return agglomerative(affinity, opts.threshold, opts.max_speakers);
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("adjusted_rand_index: label arrays differ in length");
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ca[a[i]] += 1;
    cb[b[i]] += 1;
  }
  double index = 0, sa = 0, sb = 0;
  for (const auto& [_, c] : joint) index += choose2(c);
  for (const auto& [_, c] : ca) sa += choose2(c);
  for (const auto& [_, c] : cb) sb += choose2(c);
  const double total = choose2(n);
  if (total == 0) return 1.0;
  const double expected = sa * sb / total;
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;  // both partitions trivial and identical
  return (index - expected) / (max_index - expected);
}

std::vector<formats::RttmSegment> labels_to_rttm(std::span<const int> labels,
                                                 std::span<const FrameInterval> segments,
                                                 std::string_view clip_id, const RttmOptions& opts) {
  if (labels.size() != segments.size()) throw Error("labels_to_rttm: one label per segment required");
  struct Run {
    FrameInterval span;
    int label;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (segments[i].empty()) throw Error("labels_to_rttm: empty segment");
    if (opts.merge_adjacent && !runs.empty() && runs.back().label == labels[i]) {
      const auto gap = segments[i].start - runs.back().span.end;
      if (gap >= 0 && gap <= opts.max_merge_gap) {
        runs.back().span.end = segments[i].end;
        continue;
      }
    }
    runs.push_back({segments[i], labels[i]});
  }
  std::vector<formats::RttmSegment> out;
  out.reserve(runs.size());
  for (const auto& r : runs) {
    formats::RttmSegment s;
    s.file_id = std::string(clip_id);
    s.onset = formats::frame_to_seconds(r.span.start, opts.fps);
    s.duration = formats::frame_to_seconds(r.span.length(), opts.fps);
    s.speaker = "spk" + std::to_string(r.label);
    out.push_back(std::move(s));
  }
  return out;
}

PooledEmbeddings pool_segments(const Matrix& frames, const std::vector<bool>& frame_available,
                               std::span<const FrameInterval> segments) {
  if (static_cast<Eigen::Index>(frame_available.size()) != frames.rows()) {
    throw Error("pool_segments: availability flags must match frame count");
  }
  PooledEmbeddings out{Matrix::Zero(static_cast<Eigen::Index>(segments.size()), frames.cols()),
                       std::vector<bool>(segments.size(), false)};
  for (std::size_t s = 0; s < segments.size(); ++s) {
    RowVector sum = RowVector::Zero(frames.cols());
    int count = 0;
    const auto lo = std::max<std::int64_t>(0, segments[s].start);
    const auto hi = std::min<std::int64_t>(frames.rows(), segments[s].end);
    for (auto f = lo; f < hi; ++f) {
      if (frame_available[static_cast<std::size_t>(f)]) {
        sum += frames.row(f);
        ++count;
      }
    }
    const double norm = sum.norm();
    if (count > 0 && norm > 0) {
      out.rows.row(static_cast<Eigen::Index>(s)) = sum / norm;
      out.available[s] = true;
    }
  }
  return out;
}

}  // namespace dubkit::diarize
