// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Domain types shared by several modules.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dubkit {

inline constexpr int kDefaultFps = 25;

enum class Gender { kMale, kFemale, kUnknown };

enum class AgeGroup { kChild, kTeenager, kAdult, kMiddleAged, kElderly, kUnknown };

enum class Scene { kMonologue, kNarration, kDialogue, kMultiSpeaker };

std::string_view to_string(Gender g);
std::string_view to_string(AgeGroup a);
std::string_view to_string(Scene s);

// Exact (canonical spelling) lookups; nullopt for anything else.
std::optional<Gender> gender_from_string(std::string_view s);
std::optional<AgeGroup> age_from_string(std::string_view s);
std::optional<Scene> scene_from_string(std::string_view s);

/// Half-open frame interval [start, end).
struct FrameInterval {
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end > start ? end - start : 0; }
  bool empty() const { return end <= start; }
  bool operator==(const FrameInterval&) const = default;
};

/// One non-silent segment: (start, spk, gender, age, end), frames at the pipeline fps.
struct TimestampSpeakerTuple {
  std::int64_t start = 0;
  int spk = 0;
  Gender gender = Gender::kUnknown;
  AgeGroup age = AgeGroup::kUnknown;
  std::int64_t end = 0;

  bool operator==(const TimestampSpeakerTuple&) const = default;
};

/// Verdict of one filtering stage. `reason` is non-empty whenever keep is false.
struct FilterVerdict {
  std::string stage;
  bool keep = true;
  std::string reason;
  std::optional<double> value;

  bool operator==(const FilterVerdict&) const = default;
};

/// Where speaker embeddings are spliced into the conditioning sequence.
struct SpeakerInsertion {
  std::int64_t position = 0;  // index into the source token sequence, in [0, T]
  int spk = 0;

  bool operator==(const SpeakerInsertion&) const = default;
};

struct ConditioningPlan {
  std::int64_t token_length = 0;
  std::vector<SpeakerInsertion> insertions;  // positions strictly increasing

  bool operator==(const ConditioningPlan&) const = default;
};

/// Throws dubkit::Error unless tuples are sorted by start, each start < end,
/// and pairwise non-overlapping.
void validate_tuples(const std::vector<TimestampSpeakerTuple>& tuples);

}  // namespace dubkit
