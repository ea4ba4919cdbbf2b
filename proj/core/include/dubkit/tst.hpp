// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Timestamp-speaker tokenizer.
//
// Vocabulary layout (contiguous blocks, a pure function of max_speakers):
//
//   [0, 3)                 structural: begin, end, separator
//   [3, 1503)              frame index 0..1499
//   [1503, 1503+S)         speaker index 0..S-1
//   next 3                 gender: male, female, unknown
//   next 6                 age: child, teenager, adult, middle-aged, elderly, unknown
//
// A clip encodes as
//
//   begin (start spk gender age last) sep (start spk gender age last) ... end
//
// where `last` is the frame token of end-1, the last active frame. Tuple ends
// range over 1..1500 but the codebook only has 1500 entries, so the
// inclusive end is what gets stored.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dubkit/types.hpp"

namespace dubkit::tst {

using Token = std::uint32_t;
using TokenSeq = std::vector<Token>;

inline constexpr std::int64_t kFrameCodebookSize = 1500;  // 60 s at 25 fps
inline constexpr int kDefaultMaxSpeakers = 16;

enum class Slot { kStructural, kFrame, kSpeaker, kGender, kAge };

class Vocabulary {
 public:
  explicit Vocabulary(int max_speakers = kDefaultMaxSpeakers);

  int max_speakers() const { return max_speakers_; }
  std::uint32_t size() const { return age_base_ + 6; }

  static constexpr Token begin_token() { return 0; }
  static constexpr Token end_token() { return 1; }
  static constexpr Token separator_token() { return 2; }

  Token frame_token(std::int64_t frame) const;
  Token speaker_token(int spk) const;
  Token gender_token(Gender g) const;
  Token age_token(AgeGroup a) const;

  /// Throws dubkit::Error for ids outside the vocabulary.
  Slot slot_of(Token id) const;

  std::uint32_t frame_base() const { return kFrameBase; }
  std::uint32_t speaker_base() const { return kFrameBase + kFrameCodebookSize; }
  std::uint32_t gender_base() const { return gender_base_; }
  std::uint32_t age_base() const { return age_base_; }

 private:
  static constexpr std::uint32_t kFrameBase = 3;
  int max_speakers_;
  std::uint32_t gender_base_;
  std::uint32_t age_base_;
};

/// Tuples must be sorted by start and non-overlapping; throws dubkit::Error
/// otherwise and for frames or speakers outside the vocabulary.
TokenSeq encode(const std::vector<TimestampSpeakerTuple>& tuples, const Vocabulary& vocab);

/// Inverse of encode. Throws DecodeError with the offending token offset.
std::vector<TimestampSpeakerTuple> decode(std::span<const Token> tokens, const Vocabulary& vocab);

struct MaskedTokens {
  TokenSeq tokens;
  std::vector<bool> mask;  // true where the token is gender/age `unknown`
};

MaskedTokens mask_unknown(std::span<const Token> tokens, const Vocabulary& vocab);

struct DenseLabels {
  std::vector<int> index;           // per input label
  std::vector<std::string> labels;  // index -> original label
};

/// Re-indexes arbitrary speaker labels densely 0..M-1 in first-appearance order.
DenseLabels densify_labels(std::span<const std::string> labels);

}  // namespace dubkit::tst
