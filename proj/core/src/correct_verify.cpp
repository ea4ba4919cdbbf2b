// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "dubkit/correct.hpp"
#include "dubkit/error.hpp"
#include "dubkit/metrics.hpp"
#include "dubkit/utf8.hpp"

namespace dubkit::correct {
namespace {

std::string label_key(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  std::string out(s.substr(b, e - b + 1));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

FilterVerdict discard(std::string stage, std::string reason, std::optional<double> value = std::nullopt) {
  return {std::move(stage), false, std::move(reason), value};
}

template <typename Enum>
Enum reconcile(Enum mllm, Enum model, Enum unknown) {
  if (mllm == unknown) return unknown;
  if (model != unknown && model != mllm) return unknown;
  return mllm;
}

}  // namespace

double transcript_edit_ratio(std::string_view a, std::string_view b, EditUnit unit) {
  std::size_t dist = 0, la = 0, lb = 0;
  if (unit == EditUnit::kCharacter) {
    const auto ua = utf8::decode(a);
    const auto ub = utf8::decode(b);
    dist = metrics::edit_distance<char32_t>(ua, ub);
    la = ua.size();
    lb = ub.size();
  } else {
    const auto wa = metrics::split_words(a);
    const auto wb = metrics::split_words(b);
    dist = metrics::edit_distance<std::string>(wa, wb);
    la = wa.size();
    lb = wb.size();
  }
  return static_cast<double>(dist) / static_cast<double>(std::max({la, lb, std::size_t{1}}));
}

FilterVerdict verify_transcript(std::string_view asr, std::string_view corrected, EditUnit unit,
                                double max_ratio) {
  const double ratio = transcript_edit_ratio(asr, corrected, unit);
  if (ratio > max_ratio) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "transcript edit ratio %.4f exceeds %.2f", ratio, max_ratio);
    return discard("verify-transcript", buf, ratio);
  }
  return {"verify-transcript", true, {}, ratio};
}

SpeakerCheck verify_speakers(const std::set<std::string>& diar_labels, const CorrectionResponse& resp,
                             const std::map<std::string, formats::SpeakerAttributes>& model_attrs) {
  SpeakerCheck out;
  const auto n_diar = static_cast<double>(diar_labels.size());
  if (resp.speaker_count != static_cast<int>(diar_labels.size()) ||
      resp.speakers.size() != diar_labels.size()) {
    out.verdict = discard("verify-speakers",
                          "speaker count mismatch: MLLM " + std::to_string(resp.speaker_count) +
                              ", diarization " + std::to_string(diar_labels.size()),
                          n_diar);
    return out;
  }
  std::map<std::string, std::string> by_key;  // normalized -> diarization label
  for (const auto& l : diar_labels) by_key.emplace(label_key(l), l);
  std::map<std::string, const SpeakerProfile*> matched;
  for (const auto& s : resp.speakers) {
    const auto it = by_key.find(label_key(s.label));
    if (it == by_key.end() || !matched.emplace(it->second, &s).second) {
      out.verdict = discard("verify-speakers", "speaker label '" + s.label + "' cannot be matched one-to-one",
                            n_diar);
      return out;
    }
  }
  if (matched.size() != diar_labels.size()) {
    out.verdict = discard("verify-speakers", "speaker labels cannot be matched one-to-one", n_diar);
    return out;
  }
  for (const auto& [label, profile] : matched) {
    formats::SpeakerAttributes model;
    if (const auto it = model_attrs.find(label); it != model_attrs.end()) model = it->second;
    out.attributes[label] = {reconcile(profile->gender, model.gender, Gender::kUnknown),
                             reconcile(profile->age, model.age, AgeGroup::kUnknown)};
    if (!profile->timbre.empty()) out.timbre[label] = profile->timbre;
  }
  out.verdict = {"verify-speakers", true, {}, n_diar};
  return out;
}

Scene categorize_scene(bool has_face, int n_speakers) {
  if (n_speakers < 1) throw Error("categorize_scene: need at least one active speaker");
  if (n_speakers == 1) return has_face ? Scene::kMonologue : Scene::kNarration;
  if (n_speakers == 2) return Scene::kDialogue;
  return Scene::kMultiSpeaker;
}

}  // namespace dubkit::correct
