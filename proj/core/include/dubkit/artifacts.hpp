// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

// Binary artifact files: a 16-byte little-endian header (magic "DKAR",
// dtype code, rows, cols) followed by rows*cols row-major values.
// See docs/artifacts.md.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dubkit/matrix.hpp"

namespace dubkit::artifacts {

enum class DType : std::uint32_t { kFloat32 = 1, kFloat64 = 2, kInt32 = 3, kUInt32 = 4 };

inline constexpr std::uint32_t kMagic = 0x5241'4b44;  // "DKAR" read as little-endian u32
inline constexpr std::size_t kHeaderBytes = 16;

struct Header {
  DType dtype = DType::kFloat32;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

Header decode_header(std::string_view bytes);

std::string encode_matrix(const Matrix& m, DType dtype = DType::kFloat32);
/// Any numeric dtype is widened to double.
Matrix decode_matrix(std::string_view bytes);

std::string encode_ints(std::span<const std::int32_t> values);
std::string encode_tokens(std::span<const std::uint32_t> values);
/// Integer payloads only; rows*cols values flattened.
std::vector<std::int32_t> decode_ints(std::string_view bytes);
std::vector<std::uint32_t> decode_tokens(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

inline Matrix read_matrix(const std::filesystem::path& p) { return decode_matrix(read_file(p)); }
inline std::vector<std::int32_t> read_ints(const std::filesystem::path& p) {
  return decode_ints(read_file(p));
}
inline std::vector<std::uint32_t> read_tokens(const std::filesystem::path& p) {
  return decode_tokens(read_file(p));
}

}  // namespace dubkit::artifacts
