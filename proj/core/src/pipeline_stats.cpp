// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <set>

#include "dubkit/error.hpp"
#include "dubkit/pipeline.hpp"
#include "dubkit/utf8.hpp"

namespace dubkit::pipeline {
namespace {

using formats::SampleStatus;

struct Column {
  std::string_view name;
  std::string_view key;
  bool from_scores;
  double scale;
};

constexpr std::array<Column, 11> kColumns = {{
    {"MCD-DTW", "mcd_dtw", false, 1.0},
    {"MCD-DTW-SL", "mcd_dtw_sl", false, 1.0},
    {"CER(%)", "cer", false, 100.0},
    {"WER(%)", "wer", false, 100.0},
    {"UTMOS", "UTMOS", true, 1.0},
    {"LSE-C", "LSE-C", true, 1.0},
    {"LSE-D", "LSE-D", true, 1.0},
    {"SPK-TL", "spk_tl", false, 1.0},
    {"SPK-SIM(%)", "spk_sim", false, 100.0},
    {"EMO-SIM(%)", "emo_sim", false, 100.0},
    {"ES-MOS", "ES-MOS", true, 1.0},
}};

constexpr std::array<std::string_view, 7> kMetricKeys = {"mcd_dtw", "mcd_dtw_sl", "cer",    "wer",
                                                         "spk_tl",  "spk_sim",    "emo_sim"};

bool is_active_clip(const SampleRecord& r) { return r.status == SampleStatus::kActive && r.kind == "clip"; }

std::string scene_name(const SampleRecord& r) {
  return r.scene ? std::string(to_string(*r.scene)) : std::string("unknown");
}

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

Distribution distribution(std::map<std::string, std::size_t> counts) {
  Distribution d;
  std::size_t total = 0;
  for (const auto& [k, n] : counts) total += n;
  for (const auto& [k, n] : counts) d.fractions[k] = static_cast<double>(n) / static_cast<double>(total);
  d.counts = std::move(counts);
  return d;
}

nlohmann::json distribution_json(const Distribution& d) {
  return {{"counts", d.counts}, {"fractions", d.fractions}};
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::string metrics_table(const std::vector<SampleRecord>& records) {
  std::set<std::string> metric_keys;
  std::set<std::string> score_keys;
  std::vector<const SampleRecord*> rows;
  for (const auto& r : records) {
    if (!is_active_clip(r) || (r.metrics.empty() && r.scores.empty())) continue;
    rows.push_back(&r);
    for (const auto& [k, v] : r.metrics) metric_keys.insert(k);
    for (const auto& [k, v] : r.scores) score_keys.insert(k);
  }
  std::vector<std::string> metric_cols;
  for (auto k : kMetricKeys) {
    if (metric_keys.erase(std::string(k))) metric_cols.emplace_back(k);
  }
  metric_cols.insert(metric_cols.end(), metric_keys.begin(), metric_keys.end());

  std::string out = "clip_id\tscene";
  for (const auto& k : metric_cols) out += "\t" + k;
  for (const auto& k : score_keys) out += "\t" + k;
  out += "\n";
  for (const auto* r : rows) {
    out += r->clip_id + "\t" + scene_name(*r);
    for (const auto& k : metric_cols) {
      const auto it = r->metrics.find(k);
      out += "\t" + (it == r->metrics.end() ? std::string() : fmt6(it->second));
    }
    for (const auto& k : score_keys) {
      const auto it = r->scores.find(k);
      out += "\t" + (it == r->scores.end() ? std::string() : fmt6(it->second));
    }
    out += "\n";
  }
  return out;
}

nlohmann::json metrics_summary(const std::vector<SampleRecord>& records, const MetricsConfig& cfg) {
  struct Acc {
    std::array<double, kColumns.size()> sum{};
    std::array<std::size_t, kColumns.size()> n{};
    std::size_t clips = 0;
  };
  std::map<std::string, Acc> groups;
  bool any_spk_tl = false;
  for (const auto& r : records) {
    if (!is_active_clip(r)) continue;
    for (auto* acc : {&groups[scene_name(r)], &groups["all"]}) {
      ++acc->clips;
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const auto& src = kColumns[c].from_scores ? r.scores : r.metrics;
        const auto it = src.find(std::string(kColumns[c].key));
        if (it == src.end()) continue;
        acc->sum[c] += it->second * kColumns[c].scale;
        ++acc->n[c];
      }
    }
    any_spk_tl = any_spk_tl || r.metrics.count("spk_tl");
  }
  nlohmann::json rows = nlohmann::json::object();
  for (const auto& [group, acc] : groups) {
    nlohmann::json row = {{"clips", acc.clips}};
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      row[std::string(kColumns[c].name)] =
          acc.n[c] ? nlohmann::json(acc.sum[c] / static_cast<double>(acc.n[c])) : nlohmann::json(nullptr);
    }
    rows[group] = std::move(row);
  }
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : kColumns) columns.push_back(c.name);
  nlohmann::json out = {{"columns", columns}, {"rows", rows}};
  if (any_spk_tl) out["vad_source"] = cfg.vad_source;
  return out;
}

std::size_t clue_length(std::string_view clue, ClueUnit unit) {
  const auto cps = utf8::decode(clue);
  std::size_t n = 0;
  bool in_run = false;
  for (const char32_t c : cps) {
    if (utf8::is_space(c)) {
      in_run = false;
      continue;
    }
    switch (unit) {
      case ClueUnit::kCjk:
        ++n;
        break;
      case ClueUnit::kWhitespace:
        if (!in_run) ++n;
        in_run = true;
        break;
      case ClueUnit::kAuto:
        if (utf8::is_cjk(c)) {
          ++n;
          in_run = false;
        } else {
          if (!in_run) ++n;
          in_run = true;
        }
        break;
    }
  }
  return n;
}

DatasetStats compute_stats(const std::vector<SampleRecord>& records, const StatsConfig& cfg) {
  DatasetStats s;
  std::map<std::string, std::size_t> scenes, genders, ages;
  std::vector<double> clue_lengths;
  std::size_t with_emotion = 0;
  std::size_t non_neutral = 0;
  double seconds = 0.0;
  for (const auto& r : records) {
    if (!is_active_clip(r)) continue;
    ++s.clips;
    seconds += r.duration;
    if (r.scene) ++scenes[std::string(to_string(*r.scene))];
    std::set<int> seen;
    for (const auto& t : r.tuples) {
      if (!seen.insert(t.spk).second) continue;
      ++genders[std::string(to_string(t.gender))];
      ++ages[std::string(to_string(t.age))];
    }
    if (!r.clue.empty()) clue_lengths.push_back(static_cast<double>(clue_length(r.clue, cfg.clue_unit)));
    if (r.emotion) {
      ++with_emotion;
      if (lower(*r.emotion) != "neutral") ++non_neutral;
    }
  }
  s.scene = distribution(std::move(scenes));
  s.gender = distribution(std::move(genders));
  s.age = distribution(std::move(ages));
  s.clues = clue_lengths.size();
  if (!clue_lengths.empty()) {
    double sum = 0.0;
    for (double v : clue_lengths) sum += v;
    s.clue_length_mean = sum / static_cast<double>(clue_lengths.size());
    double sq = 0.0;
    for (double v : clue_lengths) sq += (v - s.clue_length_mean) * (v - s.clue_length_mean);
    s.clue_length_variance = sq / static_cast<double>(clue_lengths.size());
  }
  if (with_emotion) s.non_neutral_emotion_fraction = static_cast<double>(non_neutral) / static_cast<double>(with_emotion);
  s.total_hours = seconds / 3600.0;
  if (s.clips) s.average_clip_seconds = seconds / static_cast<double>(s.clips);
  return s;
}

nlohmann::json stats_to_json(const DatasetStats& s) {
  return {{"clips", s.clips},
          {"scene", distribution_json(s.scene)},
          {"gender", distribution_json(s.gender)},
          {"age", distribution_json(s.age)},
          {"clues", s.clues},
          {"clue_length_mean", s.clue_length_mean},
          {"clue_length_variance", s.clue_length_variance},
          {"non_neutral_emotion_fraction", s.non_neutral_emotion_fraction},
          {"total_hours", s.total_hours},
          {"average_clip_seconds", s.average_clip_seconds}};
}

TestsetResult build_testset(const std::vector<SampleRecord>& records, int per_series) {
  if (per_series < 0) throw Error("build_testset: per_series must be non-negative");
  constexpr std::array<Scene, 4> kScenes = {Scene::kMonologue, Scene::kNarration, Scene::kDialogue,
                                            Scene::kMultiSpeaker};
  TestsetResult out;
  // series -> scene -> index of the lexicographically first clip
  std::map<std::string, std::map<Scene, std::size_t>> best;
  std::size_t unlabeled = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!is_active_clip(r) || !r.scene) continue;
    if (r.series_id.empty()) {
      ++unlabeled;
      continue;
    }
    auto& slot = best[r.series_id];
    const auto it = slot.find(*r.scene);
    if (it == slot.end() || r.clip_id < records[it->second].clip_id) slot[*r.scene] = i;
  }
  if (unlabeled) out.warnings.push_back(std::to_string(unlabeled) + " clips without series_id were skipped");
  for (const auto& [series, by_scene] : best) {
    int taken = 0;
    for (const auto scene : kScenes) {
      const auto it = by_scene.find(scene);
      if (it == by_scene.end()) {
        out.warnings.push_back("series " + series + " has no " + std::string(to_string(scene)) + " clip");
        continue;
      }
      if (taken >= per_series) continue;
      out.records.push_back(records[it->second]);
      ++taken;
    }
  }
  return out;
}

}  // namespace dubkit::pipeline
