// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/formats.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dubkit/error.hpp"

namespace dubkit::formats {
namespace {

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Splits on '\n' after dropping a BOM and turning CRLF into LF.
std::vector<std::string> split_lines(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::string> lines;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    if (c == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

bool parse_fixed_digits(std::string_view s, std::size_t n, int& out) {
  if (s.size() != n) return false;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

bool try_parse_timecode(std::string_view s, Timecode& t) {
  const auto c1 = s.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : s.find(':', c1 + 1);
  const auto comma = c2 == std::string_view::npos ? c2 : s.find(',', c2 + 1);
  if (comma == std::string_view::npos) return false;
  const auto hh = s.substr(0, c1);
  return hh.size() >= 2 && hh.size() <= 9 && parse_fixed_digits(hh, hh.size(), t.hours) &&
         parse_fixed_digits(s.substr(c1 + 1, c2 - c1 - 1), 2, t.minutes) &&
         parse_fixed_digits(s.substr(c2 + 1, comma - c2 - 1), 2, t.seconds) &&
         parse_fixed_digits(s.substr(comma + 1), 3, t.milliseconds) && t.valid();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end && std::isfinite(out);
}

std::string format_seconds(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

bool valid_rttm_token(std::string_view s) {
  return !s.empty() && s.find_first_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

Timecode Timecode::from_milliseconds(std::int64_t ms) {
  if (ms < 0) throw Error("negative timecode");
  Timecode t;
  t.milliseconds = static_cast<int>(ms % 1000);
  ms /= 1000;
  t.seconds = static_cast<int>(ms % 60);
  ms /= 60;
  t.minutes = static_cast<int>(ms % 60);
  t.hours = static_cast<int>(ms / 60);
  return t;
}

std::int64_t Timecode::total_milliseconds() const {
  return ((static_cast<std::int64_t>(hours) * 60 + minutes) * 60 + seconds) * 1000 + milliseconds;
}

bool Timecode::valid() const {
  return hours >= 0 && minutes >= 0 && minutes <= 59 && seconds >= 0 && seconds <= 59 &&
         milliseconds >= 0 && milliseconds <= 999;
}

std::string format_timecode(const Timecode& t) {
  if (!t.valid()) throw Error("timecode component out of range");
  char buf[48];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d,%03d", t.hours, t.minutes, t.seconds,
                t.milliseconds);
  return buf;
}

Timecode parse_timecode(std::string_view s) {
  Timecode t;
  if (!try_parse_timecode(s, t)) throw ParseError(0, "malformed timecode '" + std::string(s) + "'");
  return t;
}

std::int64_t timecode_to_frame(const Timecode& t, int fps) {
  if (fps <= 0) throw Error("fps must be positive");
  return t.total_milliseconds() * fps / 1000;
}

Timecode frame_to_timecode(std::int64_t frame, int fps) {
  if (fps <= 0) throw Error("fps must be positive");
  if (frame < 0) throw Error("negative frame index");
  // First millisecond at or after the frame start, so the frame maps back to itself.
  return Timecode::from_milliseconds((frame * 1000 + fps - 1) / fps);
}

std::int64_t seconds_to_frame(double seconds, int fps) {
  if (fps <= 0) throw Error("fps must be positive");
  if (seconds < 0.0) throw Error("negative time");
  return static_cast<std::int64_t>(std::floor(seconds * fps + 1e-9));
}

double frame_to_seconds(std::int64_t frame, int fps) {
  if (fps <= 0) throw Error("fps must be positive");
  return static_cast<double>(frame) / fps;
}

std::vector<SrtCue> parse_srt(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<SrtCue> cues;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (is_blank(lines[i])) {
      ++i;
      continue;
    }
    const std::size_t index_line = i + 1;
    SrtCue cue;
    {
      const auto idx = trim(lines[i]);
      auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), cue.index);
      if (ec != std::errc() || p != idx.data() + idx.size() || cue.index < 1) {
        throw ParseError(index_line, "expected a positive cue index");
      }
      if (!cues.empty() && cue.index <= cues.back().index) {
        throw ParseError(index_line, "cue index not strictly increasing");
      }
    }
    if (++i >= lines.size()) throw ParseError(index_line, "cue without timing line");
    {
      const std::size_t timing_line = i + 1;
      const std::string_view timing = trim(lines[i]);
      const auto arrow = timing.find(" --> ");
      if (arrow == std::string_view::npos) throw ParseError(timing_line, "expected 'start --> end'");
      if (!try_parse_timecode(trim(timing.substr(0, arrow)), cue.start) ||
          !try_parse_timecode(trim(timing.substr(arrow + 5)), cue.end)) {
        throw ParseError(timing_line, "malformed timecode");
      }
      if (cue.start >= cue.end) throw ParseError(timing_line, "cue start not before end");
    }
    ++i;
    bool first = true;
    while (i < lines.size() && !is_blank(lines[i])) {
      if (!first) cue.text.push_back('\n');
      cue.text += lines[i];
      first = false;
      ++i;
    }
    cues.push_back(std::move(cue));
  }
  return cues;
}

std::string serialize_srt(std::span<const SrtCue> cues) {
  std::string out;
  int prev = 0;
  for (const auto& cue : cues) {
    if (cue.index < 1 || cue.index <= prev) throw Error("cue indices must be positive and increasing");
    if (!(cue.start < cue.end)) throw Error("cue " + std::to_string(cue.index) + ": start not before end");
    if (cue.text.find('\r') != std::string::npos) {
      throw Error("cue " + std::to_string(cue.index) + ": text contains CR");
    }
    std::string_view rest = cue.text;
    if (!rest.empty()) {
      while (true) {
        const auto nl = rest.find('\n');
        if (is_blank(rest.substr(0, nl))) {
          throw Error("cue " + std::to_string(cue.index) + ": text contains a blank line");
        }
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
      }
    }
    prev = cue.index;
    out += std::to_string(cue.index);
    out += '\n';
    out += format_timecode(cue.start);
    out += " --> ";
    out += format_timecode(cue.end);
    out += '\n';
    if (!cue.text.empty()) {
      out += cue.text;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<RttmSegment> parse_rttm(std::string_view text, std::vector<RttmWarning>* warnings) {
  const auto lines = split_lines(text);
  std::vector<RttmSegment> segments;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    const auto fields = split_ws(lines[n]);
    if (fields.empty() || fields[0].starts_with(";;")) continue;
    if (fields[0] != "SPEAKER") {
      if (warnings) {
        warnings->push_back({line_no, "skipping '" + std::string(fields[0]) + "' record"});
      }
      continue;
    }
    if (fields.size() < 8 || fields.size() > 10) {
      throw ParseError(line_no, "SPEAKER record needs 9 fields after the type tag");
    }
    RttmSegment seg;
    seg.file_id = std::string(fields[1]);
    {
      auto [p, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), seg.channel);
      if (ec != std::errc() || p != fields[2].data() + fields[2].size()) {
        throw ParseError(line_no, "bad channel '" + std::string(fields[2]) + "'");
      }
    }
    if (!parse_double(fields[3], seg.onset)) throw ParseError(line_no, "bad onset");
    if (!parse_double(fields[4], seg.duration)) throw ParseError(line_no, "bad duration");
    if (seg.onset < 0) throw ParseError(line_no, "negative onset");
    if (seg.duration < 0) throw ParseError(line_no, "negative duration");
    if (seg.duration == 0) throw ParseError(line_no, "zero duration");
    seg.speaker = std::string(fields[7]);
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::string serialize_rttm(std::span<const RttmSegment> segments) {
  std::string out;
  for (const auto& s : segments) {
    if (!valid_rttm_token(s.file_id) || !valid_rttm_token(s.speaker)) {
      throw Error("RTTM file id and speaker must be non-empty and whitespace-free");
    }
    if (!std::isfinite(s.onset) || s.onset < 0) throw Error("RTTM onset must be >= 0");
    const auto dur = format_seconds(s.duration);
    if (!std::isfinite(s.duration) || !(std::stod(dur) > 0)) {
      throw Error("RTTM duration must be > 0 at millisecond resolution");
    }
    out += "SPEAKER ";
    out += s.file_id;
    out += ' ';
    out += std::to_string(s.channel);
    out += ' ';
    out += format_seconds(s.onset);
    out += ' ';
    out += dur;
    out += " <NA> <NA> ";
    out += s.speaker;
    out += " <NA> <NA>\n";
  }
  return out;
}

}  // namespace dubkit::formats
