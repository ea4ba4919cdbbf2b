// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dubkit/correct.hpp"
#include "dubkit/error.hpp"

namespace dubkit::correct {
namespace {

constexpr std::string_view kOutputSchema = R"({
  "transcript": "<corrected transcript with punctuation>",
  "speaker_count": <integer>,
  "speakers": [
    {"label": "<speaker ID from the table>", "gender": "male|female|unknown",
     "age": "child|teenager|adult|middle-aged|elderly|unknown",
     "timbre": ["<keyword>", "..."]}
  ],
  "long_clue": "<character profiles, speaking style and emotional development>",
  "short_clue": "<one-sentence summary>",
  "emotion": "<overall emotional tone, or neutral>"
})";

constexpr std::string_view kCotCorrectionV1 = R"(You are annotating one clip of a television drama for a speech dubbing corpus.

Clip: {{clip_id}}
Vocal track: {{vocal_track}}

ASR transcript:
{{asr_transcript}}

Speaker diarization ({{num_tuples}} segments, seconds):
{{tuples}}

Work through the following steps before answering.
1. Listen to the vocal track and decide which speaker is active in each segment.
2. Correct lexical and punctuation errors in the ASR transcript. Do not paraphrase.
3. Infer the true number of speakers and, for each speaker ID in the table, the gender, age group and timbre traits.
4. Judge the overall emotional tone of the clip.
5. Summarize character profiles and emotion as a long clue and a short clue.

Use the speaker IDs exactly as they appear in the table. Use "unknown" when an attribute cannot be determined.
Reply with a single JSON object and nothing else, following this schema:
{{output_schema}}
)";

std::string format_seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

TemplateRegistry TemplateRegistry::builtin() {
  TemplateRegistry r;
  r.add(std::string(kDefaultTemplateId), std::string(kCotCorrectionV1));
  return r;
}

void TemplateRegistry::add(std::string id, std::string text) { templates_[std::move(id)] = std::move(text); }

void TemplateRegistry::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("template directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    add(entry.path().stem().string(), ss.str());
  }
}

const std::string* TemplateRegistry::find(std::string_view id) const {
  const auto it = templates_.find(id);
  return it == templates_.end() ? nullptr : &it->second;
}

std::string render_tuple_table(const std::vector<DiarTuple>& tuples) {
  std::string out = "start\tspeaker\tend";
  for (const auto& t : tuples) {
    out += '\n';
    out += format_seconds(t.start);
    out += '\t';
    out += t.speaker;
    out += '\t';
    out += format_seconds(t.end);
  }
  return out;
}

std::string render_prompt(const CorrectionRequest& req, std::string_view template_id,
                          const TemplateRegistry& registry) {
  const std::string* tmpl = registry.find(template_id);
  if (!tmpl) throw Error("prompt template '" + std::string(template_id) + "' not found");
  for (std::size_t i = 0; i < req.tuples.size(); ++i) {
    const auto& t = req.tuples[i];
    if (!(t.start < t.end) || (i > 0 && t.start < req.tuples[i - 1].end)) {
      throw Error("correction request tuples must be sorted and non-overlapping");
    }
    if (t.speaker.find_first_of("\t\n") != std::string::npos) {
      throw Error("speaker labels may not contain tabs or newlines");
    }
  }
  const std::map<std::string, std::string, std::less<>> values = {
      {"clip_id", req.clip_id},
      {"vocal_track", req.vocal_track},
      {"asr_transcript", req.asr_transcript},
      {"num_tuples", std::to_string(req.tuples.size())},
      {"tuples", render_tuple_table(req.tuples)},
      {"output_schema", std::string(kOutputSchema)},
  };
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl->find("{{", pos);
    if (open == std::string::npos) {
      out.append(*tmpl, pos);
      break;
    }
    const auto close = tmpl->find("}}", open + 2);
    if (close == std::string::npos) throw Error("unterminated placeholder in template");
    out.append(*tmpl, pos, open - pos);
    const std::string_view name(tmpl->data() + open + 2, close - open - 2);
    const auto it = values.find(name);
    if (it == values.end()) throw Error("unknown placeholder '" + std::string(name) + "'");
    out += it->second;
    pos = close + 2;
  }
  return out;
}

}  // namespace dubkit::correct
