// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// SubRip and RTTM readers/writers plus timecode <-> frame conversion.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dubkit/types.hpp"

namespace dubkit::formats {

struct Timecode {
  int hours = 0;
  int minutes = 0;       // 0-59
  int seconds = 0;       // 0-59
  int milliseconds = 0;  // 0-999

  static Timecode from_milliseconds(std::int64_t ms);
  std::int64_t total_milliseconds() const;
  bool valid() const;

  auto operator<=>(const Timecode&) const = default;
};

/// `HH:MM:SS,mmm`; hours are zero-padded to at least two digits.
std::string format_timecode(const Timecode& t);
/// Strict inverse of format_timecode. Throws ParseError (line 0) on malformed input.
Timecode parse_timecode(std::string_view s);

/// Frames are on a floor grid: frame = floor(ms * fps / 1000).
std::int64_t timecode_to_frame(const Timecode& t, int fps = kDefaultFps);
Timecode frame_to_timecode(std::int64_t frame, int fps = kDefaultFps);

/// Seconds (millisecond resolution) to frame index, floor rounding.
std::int64_t seconds_to_frame(double seconds, int fps = kDefaultFps);
double frame_to_seconds(std::int64_t frame, int fps = kDefaultFps);

struct SrtCue {
  int index = 1;
  Timecode start;
  Timecode end;
  std::string text;  // lines joined with '\n', no trailing newline

  bool operator==(const SrtCue&) const = default;
};

/// Parses SubRip text. CRLF is normalized to LF and a UTF-8 BOM is dropped.
/// Throws ParseError carrying the offending line number.
std::vector<SrtCue> parse_srt(std::string_view text);

/// Canonical form: "<index>\n<start> --> <end>\n<text>\n\n" per cue.
/// Throws dubkit::Error for cues that would not parse back identically.
std::string serialize_srt(std::span<const SrtCue> cues);

struct RttmSegment {
  std::string file_id;
  int channel = 1;
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds, > 0
  std::string speaker;

  bool operator==(const RttmSegment&) const = default;
};

struct RttmWarning {
  std::size_t line = 0;
  std::string message;
};

/// Reads SPEAKER records. Other record types are skipped and reported through
/// `warnings` when given; ";;" comment lines and blank lines are ignored.
std::vector<RttmSegment> parse_rttm(std::string_view text,
                                    std::vector<RttmWarning>* warnings = nullptr);

/// One SPEAKER line per segment, onset/duration with 3 decimals.
std::string serialize_rttm(std::span<const RttmSegment> segments);

}  // namespace dubkit::formats
