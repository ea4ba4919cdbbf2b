// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "dubkit/correct.hpp"
#include "dubkit/error.hpp"

namespace dubkit::correct {

using nlohmann::json;

namespace {

std::string fold(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return c == '_' || c == ' ' ? '-' : static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string string_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw Error(std::string("response field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> timbre_field(const json& s) {
  if (!s.contains("timbre") || s.at("timbre").is_null()) return {};
  const auto& t = s.at("timbre");
  std::vector<std::string> out;
  if (t.is_string()) {
    // "deep, husky" style lists are common.
    std::string cur;
    for (char c : t.get<std::string>() + ",") {
      if (c == ',') {
        const auto b = cur.find_first_not_of(' ');
        if (b != std::string::npos) out.push_back(cur.substr(b, cur.find_last_not_of(' ') - b + 1));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    return out;
  }
  if (!t.is_array()) throw Error("response field 'timbre' must be a list of strings");
  for (const auto& k : t) {
    if (!k.is_string()) throw Error("response field 'timbre' must be a list of strings");
    out.push_back(k.get<std::string>());
  }
  return out;
}

}  // namespace

Gender coerce_gender(std::string_view s) {
  const auto f = fold(s);
  if (f == "male" || f == "m" || f == "man" || f == "男" || f == "男性") return Gender::kMale;
  if (f == "female" || f == "f" || f == "woman" || f == "女" || f == "女性") return Gender::kFemale;
  return Gender::kUnknown;
}

AgeGroup coerce_age(std::string_view s) {
  const auto f = fold(s);
  if (f == "child" || f == "kid" || f == "儿童" || f == "孩子" || f == "小孩") return AgeGroup::kChild;
  if (f == "teenager" || f == "teen" || f == "adolescent" || f == "青少年" || f == "少年") {
    return AgeGroup::kTeenager;
  }
  if (f == "adult" || f == "young-adult" || f == "青年" || f == "成年" || f == "成年人") {
    return AgeGroup::kAdult;
  }
  if (f == "middle-aged" || f == "middleaged" || f == "middle-age" || f == "中年") {
    return AgeGroup::kMiddleAged;
  }
  if (f == "elderly" || f == "old" || f == "senior" || f == "老年" || f == "老人") return AgeGroup::kElderly;
  return AgeGroup::kUnknown;
}

CorrectionResponse parse_response(std::string_view raw) {
  const auto open = raw.find('{');
  const auto close = raw.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw Error("MLLM response contains no JSON object");
  }
  json j;
  try {
    j = json::parse(raw.substr(open, close - open + 1));
  } catch (const json::parse_error& e) {
    throw Error(std::string("MLLM response is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("MLLM response must be a JSON object");

  std::vector<std::string> missing;
  for (const char* key : {"transcript", "speaker_count", "speakers", "long_clue", "short_clue", "emotion"}) {
    if (!j.contains(key) || j.at(key).is_null()) missing.emplace_back(key);
  }
  if (!missing.empty()) {
    std::string msg = "MLLM response is missing required fields:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(msg);
  }

  CorrectionResponse r;
  r.transcript = string_field(j, "transcript");
  r.long_clue = string_field(j, "long_clue");
  r.short_clue = string_field(j, "short_clue");
  r.emotion = string_field(j, "emotion");
  if (!j.at("speaker_count").is_number_integer()) throw Error("response field 'speaker_count' must be an integer");
  r.speaker_count = j.at("speaker_count").get<int>();
  const auto& speakers = j.at("speakers");
  if (!speakers.is_array()) throw Error("response field 'speakers' must be a list");
  for (const auto& s : speakers) {
    if (!s.is_object() || !s.contains("label")) throw Error("every speaker entry needs a 'label'");
    SpeakerProfile p;
    p.label = string_field(s, "label");
    if (s.contains("gender") && s.at("gender").is_string()) p.gender = coerce_gender(s.at("gender").get<std::string>());
    if (s.contains("age") && s.at("age").is_string()) p.age = coerce_age(s.at("age").get<std::string>());
    p.timbre = timbre_field(s);
    r.speakers.push_back(std::move(p));
  }
  if (r.speaker_count != static_cast<int>(r.speakers.size())) {
    throw Error("response speaker_count " + std::to_string(r.speaker_count) + " disagrees with " +
                std::to_string(r.speakers.size()) + " speaker entries");
  }
  return r;
}

std::string render_response(const CorrectionResponse& resp) {
  json speakers = json::array();
  for (const auto& s : resp.speakers) {
    speakers.push_back({{"label", s.label},
                        {"gender", to_string(s.gender)},
                        {"age", to_string(s.age)},
                        {"timbre", s.timbre}});
  }
  const json j = {{"transcript", resp.transcript},   {"speaker_count", resp.speaker_count},
                  {"speakers", std::move(speakers)}, {"long_clue", resp.long_clue},
                  {"short_clue", resp.short_clue},   {"emotion", resp.emotion}};
  return j.dump(2);
}

}  // namespace dubkit::correct
