// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/tst.hpp"

#include <unordered_map>

#include "dubkit/error.hpp"

namespace dubkit::tst {

Vocabulary::Vocabulary(int max_speakers) : max_speakers_(max_speakers) {
  if (max_speakers < 1) throw Error("max_speakers must be >= 1");
  gender_base_ = speaker_base() + static_cast<std::uint32_t>(max_speakers);
  age_base_ = gender_base_ + 3;
}

Token Vocabulary::frame_token(std::int64_t frame) const {
  if (frame < 0 || frame >= kFrameCodebookSize) {
    throw Error("frame index " + std::to_string(frame) + " outside the 1500-entry codebook");
  }
  return kFrameBase + static_cast<Token>(frame);
}

Token Vocabulary::speaker_token(int spk) const {
  if (spk < 0 || spk >= max_speakers_) {
    throw Error("speaker index " + std::to_string(spk) + " outside [0, " +
                std::to_string(max_speakers_) + ")");
  }
  return speaker_base() + static_cast<Token>(spk);
}

Token Vocabulary::gender_token(Gender g) const { return gender_base_ + static_cast<Token>(g); }

Token Vocabulary::age_token(AgeGroup a) const { return age_base_ + static_cast<Token>(a); }

Slot Vocabulary::slot_of(Token id) const {
  if (id < kFrameBase) return Slot::kStructural;
  if (id < speaker_base()) return Slot::kFrame;
  if (id < gender_base_) return Slot::kSpeaker;
  if (id < age_base_) return Slot::kGender;
  if (id < size()) return Slot::kAge;
  throw Error("token id " + std::to_string(id) + " outside the vocabulary");
}

TokenSeq encode(const std::vector<TimestampSpeakerTuple>& tuples, const Vocabulary& vocab) {
  validate_tuples(tuples);
  TokenSeq out;
  out.reserve(2 + 6 * tuples.size());
  out.push_back(Vocabulary::begin_token());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& t = tuples[i];
    if (t.end > kFrameCodebookSize) {
      throw Error("tuple end " + std::to_string(t.end) + " beyond frame " +
                  std::to_string(kFrameCodebookSize));
    }
    if (i > 0) out.push_back(Vocabulary::separator_token());
    out.push_back(vocab.frame_token(t.start));
    out.push_back(vocab.speaker_token(t.spk));
    out.push_back(vocab.gender_token(t.gender));
    out.push_back(vocab.age_token(t.age));
    out.push_back(vocab.frame_token(t.end - 1));
  }
  out.push_back(Vocabulary::end_token());
  return out;
}

namespace {

Token expect_slot(std::span<const Token> tokens, std::size_t at, Slot slot, const Vocabulary& vocab,
                  const char* what) {
  if (at >= tokens.size()) throw DecodeError(at, std::string("truncated segment, expected ") + what);
  const Token id = tokens[at];
  Slot actual;
  try {
    actual = vocab.slot_of(id);
  } catch (const Error&) {
    throw DecodeError(at, "token id " + std::to_string(id) + " outside the vocabulary");
  }
  if (actual != slot) {
    throw DecodeError(at, "token " + std::to_string(id) + " is not a " + what + " token");
  }
  return id;
}

}  // namespace

std::vector<TimestampSpeakerTuple> decode(std::span<const Token> tokens, const Vocabulary& vocab) {
  if (tokens.empty() || tokens[0] != Vocabulary::begin_token()) {
    throw DecodeError(0, "sequence must start with the begin marker");
  }
  std::vector<TimestampSpeakerTuple> out;
  std::size_t i = 1;
  while (true) {
    if (i >= tokens.size()) throw DecodeError(i, "missing end marker");
    if (tokens[i] == Vocabulary::end_token()) {
      if (i + 1 != tokens.size()) throw DecodeError(i + 1, "tokens after the end marker");
      break;
    }
    if (!out.empty()) {
      if (tokens[i] != Vocabulary::separator_token()) {
        throw DecodeError(i, "expected a separator or the end marker");
      }
      ++i;
    }
    const std::size_t seg_at = i;
    TimestampSpeakerTuple t;
    t.start = expect_slot(tokens, i++, Slot::kFrame, vocab, "start frame") - vocab.frame_base();
    t.spk = static_cast<int>(expect_slot(tokens, i++, Slot::kSpeaker, vocab, "speaker") -
                             vocab.speaker_base());
    t.gender = static_cast<Gender>(expect_slot(tokens, i++, Slot::kGender, vocab, "gender") -
                                   vocab.gender_base());
    t.age = static_cast<AgeGroup>(expect_slot(tokens, i++, Slot::kAge, vocab, "age") - vocab.age_base());
    const std::size_t end_at = i;
    t.end = static_cast<std::int64_t>(expect_slot(tokens, i++, Slot::kFrame, vocab, "end frame") -
                                      vocab.frame_base()) + 1;
    if (t.start >= t.end) throw DecodeError(end_at, "segment end not after its start");
    if (!out.empty() && t.start < out.back().end) {
      throw DecodeError(seg_at, "segment overlaps or precedes the previous one");
    }
    out.push_back(t);
  }
  return out;
}

MaskedTokens mask_unknown(std::span<const Token> tokens, const Vocabulary& vocab) {
  MaskedTokens out{TokenSeq(tokens.begin(), tokens.end()), std::vector<bool>(tokens.size(), false)};
  const Token unknown_gender = vocab.gender_token(Gender::kUnknown);
  const Token unknown_age = vocab.age_token(AgeGroup::kUnknown);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.mask[i] = tokens[i] == unknown_gender || tokens[i] == unknown_age;
  }
  return out;
}

DenseLabels densify_labels(std::span<const std::string> labels) {
  DenseLabels out;
  std::unordered_map<std::string, int> seen;
  out.index.reserve(labels.size());
  for (const auto& l : labels) {
    auto [it, inserted] = seen.emplace(l, static_cast<int>(out.labels.size()));
    if (inserted) out.labels.push_back(l);
    out.index.push_back(it->second);
  }
  return out;
}

}  // namespace dubkit::tst
