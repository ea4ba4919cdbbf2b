// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dubkit/error.hpp"

namespace dubkit::formats {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "artifacts", "asr_transcript", "cfg_drop",       "clip_id",    "clue",
      "diarization", "duration",     "emotion",        "failure",    "has_face",
      "hyp_transcript", "kind",      "metrics",        "model_attrs", "offset",
      "scene",     "scores",         "series_id",      "short_clue", "speaker_labels",
      "ssc_plan",  "stage_hashes",   "status",         "timbre",     "transcript",
      "tuples",    "verdicts"};
  return keys;
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename Enum>
Enum enum_field(const json& j, const char* key, std::optional<Enum> (*parse)(std::string_view)) {
  const auto s = get_as<std::string>(j, key);
  const auto v = parse(s);
  if (!v) throw Error(std::string("field '") + key + "' has unknown value '" + s + "'");
  return *v;
}

json tuple_to_json(const TimestampSpeakerTuple& t) {
  return json{{"start", t.start},
              {"spk", t.spk},
              {"gender", to_string(t.gender)},
              {"age", to_string(t.age)},
              {"end", t.end}};
}

TimestampSpeakerTuple tuple_from_json(const json& j) {
  if (!j.is_object()) throw Error("tuple must be an object");
  TimestampSpeakerTuple t;
  t.start = get_as<std::int64_t>(j, "start");
  t.end = get_as<std::int64_t>(j, "end");
  t.spk = get_as<int>(j, "spk");
  t.gender = enum_field<Gender>(j, "gender", &gender_from_string);
  t.age = enum_field<AgeGroup>(j, "age", &age_from_string);
  return t;
}

json verdict_to_json(const FilterVerdict& v) {
  json j{{"stage", v.stage}, {"keep", v.keep}};
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (v.value) j["value"] = *v.value;
  return j;
}

FilterVerdict verdict_from_json(const json& j) {
  if (!j.is_object()) throw Error("verdict must be an object");
  FilterVerdict v;
  v.stage = get_as<std::string>(j, "stage");
  v.keep = get_as<bool>(j, "keep");
  if (j.contains("reason")) v.reason = get_as<std::string>(j, "reason");
  if (j.contains("value")) v.value = get_as<double>(j, "value");
  if (!v.keep && v.reason.empty()) throw Error("discard verdict without a reason");
  return v;
}

std::optional<SampleStatus> status_from_string(std::string_view s) {
  if (s == "active") return SampleStatus::kActive;
  if (s == "discarded") return SampleStatus::kDiscarded;
  if (s == "failed") return SampleStatus::kFailed;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::kActive: return "active";
    case SampleStatus::kDiscarded: return "discarded";
    case SampleStatus::kFailed: return "failed";
  }
  return "?";
}

json record_to_json(const SampleRecord& r) {
  json j = r.extra.is_object() ? r.extra : json::object();
  j["clip_id"] = r.clip_id;
  if (r.kind != "clip") j["kind"] = r.kind;
  if (!r.series_id.empty()) j["series_id"] = r.series_id;
  if (r.offset != 0.0) j["offset"] = r.offset;
  j["duration"] = r.duration;
  if (!r.transcript.empty()) j["transcript"] = r.transcript;
  if (!r.asr_transcript.empty()) j["asr_transcript"] = r.asr_transcript;
  if (!r.clue.empty()) j["clue"] = r.clue;
  if (!r.short_clue.empty()) j["short_clue"] = r.short_clue;
  if (r.scene) j["scene"] = to_string(*r.scene);
  if (r.has_face) j["has_face"] = *r.has_face;
  if (!r.tuples.empty()) {
    json arr = json::array();
    for (const auto& t : r.tuples) arr.push_back(tuple_to_json(t));
    j["tuples"] = std::move(arr);
  }
  if (!r.speaker_labels.empty()) j["speaker_labels"] = r.speaker_labels;
  if (!r.diarization.empty()) {
    json arr = json::array();
    for (const auto& d : r.diarization) {
      arr.push_back({{"start", d.span.start}, {"end", d.span.end}, {"speaker", d.speaker}});
    }
    j["diarization"] = std::move(arr);
  }
  if (!r.model_attrs.empty()) {
    json m = json::object();
    for (const auto& [label, a] : r.model_attrs) {
      m[label] = {{"gender", to_string(a.gender)}, {"age", to_string(a.age)}};
    }
    j["model_attrs"] = std::move(m);
  }
  if (!r.timbre.empty()) j["timbre"] = r.timbre;
  if (!r.artifacts.empty()) j["artifacts"] = r.artifacts;
  if (r.emotion) j["emotion"] = *r.emotion;
  if (r.ssc_plan) {
    json ins = json::array();
    for (const auto& i : r.ssc_plan->insertions) ins.push_back({{"position", i.position}, {"spk", i.spk}});
    j["ssc_plan"] = {{"token_length", r.ssc_plan->token_length}, {"insertions", std::move(ins)}};
  }
  if (r.cfg_drop) j["cfg_drop"] = *r.cfg_drop;
  if (r.hyp_transcript) j["hyp_transcript"] = *r.hyp_transcript;
  if (!r.scores.empty()) j["scores"] = r.scores;
  if (!r.metrics.empty()) j["metrics"] = r.metrics;
  if (!r.verdicts.empty()) {
    json arr = json::array();
    for (const auto& v : r.verdicts) arr.push_back(verdict_to_json(v));
    j["verdicts"] = std::move(arr);
  }
  if (r.status != SampleStatus::kActive) j["status"] = to_string(r.status);
  if (!r.failure.empty()) j["failure"] = r.failure;
  if (!r.stage_hashes.empty()) j["stage_hashes"] = r.stage_hashes;
  return j;
}

SampleRecord record_from_json(const json& j) {
  if (!j.is_object()) throw Error("record must be a JSON object");
  if (!j.contains("clip_id")) throw Error("missing required field 'clip_id'");
  SampleRecord r;
  r.clip_id = get_as<std::string>(j, "clip_id");
  if (r.clip_id.empty()) throw Error("empty clip_id");
  if (j.contains("kind")) r.kind = get_as<std::string>(j, "kind");
  if (r.kind != "clip" && r.kind != "source") throw Error("field 'kind' must be 'clip' or 'source'");
  if (j.contains("series_id")) r.series_id = get_as<std::string>(j, "series_id");
  if (j.contains("offset")) r.offset = get_as<double>(j, "offset");
  if (j.contains("duration")) r.duration = get_as<double>(j, "duration");
  if (r.duration < 0) throw Error("negative duration");
  if (j.contains("transcript")) r.transcript = get_as<std::string>(j, "transcript");
  if (j.contains("asr_transcript")) r.asr_transcript = get_as<std::string>(j, "asr_transcript");
  if (j.contains("clue")) r.clue = get_as<std::string>(j, "clue");
  if (j.contains("short_clue")) r.short_clue = get_as<std::string>(j, "short_clue");
  if (j.contains("scene")) r.scene = enum_field<Scene>(j, "scene", &scene_from_string);
  if (j.contains("has_face")) r.has_face = get_as<bool>(j, "has_face");
  if (j.contains("tuples")) {
    const auto& arr = j.at("tuples");
    if (!arr.is_array()) throw Error("field 'tuples' must be an array");
    for (const auto& t : arr) r.tuples.push_back(tuple_from_json(t));
    validate_tuples(r.tuples);
  }
  if (j.contains("speaker_labels")) {
    r.speaker_labels = get_as<std::vector<std::string>>(j, "speaker_labels");
  }
  if (j.contains("diarization")) {
    const auto& arr = j.at("diarization");
    if (!arr.is_array()) throw Error("field 'diarization' must be an array");
    for (const auto& d : arr) {
      DiarSegment seg;
      seg.span.start = get_as<std::int64_t>(d, "start");
      seg.span.end = get_as<std::int64_t>(d, "end");
      seg.speaker = get_as<std::string>(d, "speaker");
      if (seg.span.start < 0 || seg.span.start >= seg.span.end) {
        throw Error("diarization segment requires 0 <= start < end");
      }
      r.diarization.push_back(std::move(seg));
    }
  }
  if (j.contains("model_attrs")) {
    const auto& m = j.at("model_attrs");
    if (!m.is_object()) throw Error("field 'model_attrs' must be an object");
    for (const auto& [label, a] : m.items()) {
      SpeakerAttributes attrs;
      attrs.gender = enum_field<Gender>(a, "gender", &gender_from_string);
      attrs.age = enum_field<AgeGroup>(a, "age", &age_from_string);
      r.model_attrs.emplace(label, attrs);
    }
  }
  if (j.contains("timbre")) {
    r.timbre = get_as<std::map<std::string, std::vector<std::string>>>(j, "timbre");
  }
  if (j.contains("artifacts")) r.artifacts = get_as<std::map<std::string, std::string>>(j, "artifacts");
  if (j.contains("emotion")) r.emotion = get_as<std::string>(j, "emotion");
  if (j.contains("ssc_plan")) {
    const auto& p = j.at("ssc_plan");
    ConditioningPlan plan;
    plan.token_length = get_as<std::int64_t>(p, "token_length");
    if (!p.contains("insertions") || !p.at("insertions").is_array()) {
      throw Error("field 'ssc_plan.insertions' must be an array");
    }
    for (const auto& i : p.at("insertions")) {
      SpeakerInsertion ins{get_as<std::int64_t>(i, "position"), get_as<int>(i, "spk")};
      if (ins.position < 0 || ins.position > plan.token_length ||
          (!plan.insertions.empty() && ins.position <= plan.insertions.back().position)) {
        throw Error("ssc_plan positions must be strictly increasing within [0, token_length]");
      }
      plan.insertions.push_back(ins);
    }
    r.ssc_plan = std::move(plan);
  }
  if (j.contains("cfg_drop")) r.cfg_drop = get_as<bool>(j, "cfg_drop");
  if (j.contains("hyp_transcript")) r.hyp_transcript = get_as<std::string>(j, "hyp_transcript");
  if (j.contains("scores")) r.scores = get_as<std::map<std::string, double>>(j, "scores");
  if (j.contains("metrics")) r.metrics = get_as<std::map<std::string, double>>(j, "metrics");
  if (j.contains("verdicts")) {
    const auto& arr = j.at("verdicts");
    if (!arr.is_array()) throw Error("field 'verdicts' must be an array");
    for (const auto& v : arr) r.verdicts.push_back(verdict_from_json(v));
  }
  if (j.contains("status")) {
    const auto s = status_from_string(get_as<std::string>(j, "status"));
    if (!s) throw Error("field 'status' has an unknown value");
    r.status = *s;
  }
  if (j.contains("failure")) r.failure = get_as<std::string>(j, "failure");
  if (j.contains("stage_hashes")) {
    r.stage_hashes = get_as<std::map<std::string, std::string>>(j, "stage_hashes");
  }
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().contains(key)) r.extra[key] = value;
  }
  return r;
}

std::vector<SampleRecord> read_manifest(std::string_view text) {
  std::vector<SampleRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    try {
      records.push_back(record_from_json(j));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return records;
}

std::string write_manifest(const std::vector<SampleRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump(-1, ' ', false, json::error_handler_t::strict);
    out += '\n';
  }
  return out;
}

std::vector<SampleRecord> read_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_manifest(ss.str());
}

void write_manifest_file(const std::filesystem::path& path, const std::vector<SampleRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write manifest " + path.string());
  out << write_manifest(records);
}

}  // namespace dubkit::formats
