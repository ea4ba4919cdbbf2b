// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/types.hpp"

#include <array>
#include <utility>

#include "dubkit/error.hpp"

namespace dubkit {
namespace {

constexpr std::array<std::pair<Gender, std::string_view>, 3> kGenderNames{{
    {Gender::kMale, "male"},
    {Gender::kFemale, "female"},
    {Gender::kUnknown, "unknown"},
}};

constexpr std::array<std::pair<AgeGroup, std::string_view>, 6> kAgeNames{{
    {AgeGroup::kChild, "child"},
    {AgeGroup::kTeenager, "teenager"},
    {AgeGroup::kAdult, "adult"},
    {AgeGroup::kMiddleAged, "middle-aged"},
    {AgeGroup::kElderly, "elderly"},
    {AgeGroup::kUnknown, "unknown"},
}};

constexpr std::array<std::pair<Scene, std::string_view>, 4> kSceneNames{{
    {Scene::kMonologue, "monologue"},
    {Scene::kNarration, "narration"},
    {Scene::kDialogue, "dialogue"},
    {Scene::kMultiSpeaker, "multi-speaker"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table,
                           std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Gender g) { return name_of(kGenderNames, g); }
std::string_view to_string(AgeGroup a) { return name_of(kAgeNames, a); }
std::string_view to_string(Scene s) { return name_of(kSceneNames, s); }

std::optional<Gender> gender_from_string(std::string_view s) { return lookup(kGenderNames, s); }
std::optional<AgeGroup> age_from_string(std::string_view s) { return lookup(kAgeNames, s); }
std::optional<Scene> scene_from_string(std::string_view s) { return lookup(kSceneNames, s); }

void validate_tuples(const std::vector<TimestampSpeakerTuple>& tuples) {
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& t = tuples[i];
    if (t.start < 0 || t.start >= t.end) {
      throw Error("tuple " + std::to_string(i) + ": requires 0 <= start < end");
    }
    if (t.spk < 0) throw Error("tuple " + std::to_string(i) + ": negative speaker index");
    if (i > 0) {
      const auto& prev = tuples[i - 1];
      if (t.start < prev.start) {
        throw Error("tuple " + std::to_string(i) + ": tuples not sorted by start");
      }
      if (t.start < prev.end) {
        throw Error("tuple " + std::to_string(i) + ": overlaps the previous tuple");
      }
    }
  }
}

}  // namespace dubkit
