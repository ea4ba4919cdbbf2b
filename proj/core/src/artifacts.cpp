// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "dubkit/artifacts.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dubkit/error.hpp"

namespace dubkit::artifacts {

static_assert(std::endian::native == std::endian::little, "artifact I/O assumes a little-endian host");

namespace {

std::size_t dtype_size(DType d) {
  switch (d) {
    case DType::kFloat32:
    case DType::kInt32:
    case DType::kUInt32:
      return 4;
    case DType::kFloat64:
      return 8;
  }
  throw Error("unknown artifact dtype");
}

void put_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v;
  std::memcpy(&v, bytes.data() + at, 4);
  return v;
}

std::string header_bytes(DType dtype, std::size_t rows, std::size_t cols) {
  if (rows > UINT32_MAX || cols > UINT32_MAX) throw Error("artifact dimensions exceed 32 bits");
  std::string out;
  put_u32(out, kMagic);
  put_u32(out, static_cast<std::uint32_t>(dtype));
  put_u32(out, static_cast<std::uint32_t>(rows));
  put_u32(out, static_cast<std::uint32_t>(cols));
  return out;
}

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

const char* payload(std::string_view bytes, const Header& h) {
  const std::size_t need = kHeaderBytes + std::size_t{h.rows} * h.cols * dtype_size(h.dtype);
  if (bytes.size() != need) {
    throw Error("artifact payload size mismatch: expected " + std::to_string(need) + " bytes, got " +
                std::to_string(bytes.size()));
  }
  return bytes.data() + kHeaderBytes;
}

template <typename Int>
std::vector<Int> decode_integers(std::string_view bytes) {
  const Header h = decode_header(bytes);
  if (h.dtype != DType::kInt32 && h.dtype != DType::kUInt32) {
    throw Error("expected an integer artifact");
  }
  const char* p = payload(bytes, h);
  const std::size_t n = std::size_t{h.rows} * h.cols;
  std::vector<Int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (h.dtype == DType::kInt32) {
      const auto v = load<std::int32_t>(p + 4 * i);
      if constexpr (std::is_unsigned_v<Int>) {
        if (v < 0) throw Error("negative value in token artifact");
      }
      out[i] = static_cast<Int>(v);
    } else {
      const auto v = load<std::uint32_t>(p + 4 * i);
      if constexpr (std::is_signed_v<Int>) {
        if (v > static_cast<std::uint32_t>(INT32_MAX)) throw Error("value overflows int32");
      }
      out[i] = static_cast<Int>(v);
    }
  }
  return out;
}

}  // namespace

Header decode_header(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes) throw Error("artifact shorter than its 16-byte header");
  if (get_u32(bytes, 0) != kMagic) throw Error("bad artifact magic");
  Header h;
  const auto code = get_u32(bytes, 4);
  if (code < 1 || code > 4) throw Error("unknown artifact dtype code " + std::to_string(code));
  h.dtype = static_cast<DType>(code);
  h.rows = get_u32(bytes, 8);
  h.cols = get_u32(bytes, 12);
  return h;
}

std::string encode_matrix(const Matrix& m, DType dtype) {
  std::string out = header_bytes(dtype, m.rows(), m.cols());
  out.reserve(kHeaderBytes + m.size() * dtype_size(dtype));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      switch (dtype) {
        case DType::kFloat32: store(out, static_cast<float>(v)); break;
        case DType::kFloat64: store(out, v); break;
        case DType::kInt32: store(out, static_cast<std::int32_t>(v)); break;
        case DType::kUInt32: store(out, static_cast<std::uint32_t>(v)); break;
      }
    }
  }
  return out;
}

Matrix decode_matrix(std::string_view bytes) {
  const Header h = decode_header(bytes);
  const char* p = payload(bytes, h);
  Matrix m(h.rows, h.cols);
  const std::size_t w = dtype_size(h.dtype);
  for (std::size_t i = 0; i < std::size_t{h.rows} * h.cols; ++i) {
    double v = 0;
    switch (h.dtype) {
      case DType::kFloat32: v = load<float>(p + w * i); break;
      case DType::kFloat64: v = load<double>(p + w * i); break;
      case DType::kInt32: v = load<std::int32_t>(p + w * i); break;
      case DType::kUInt32: v = load<std::uint32_t>(p + w * i); break;
    }
    m.data()[i] = v;
  }
  return m;
}

std::string encode_ints(std::span<const std::int32_t> values) {
  std::string out = header_bytes(DType::kInt32, values.size(), 1);
  for (auto v : values) store(out, v);
  return out;
}

std::string encode_tokens(std::span<const std::uint32_t> values) {
  std::string out = header_bytes(DType::kUInt32, values.size(), 1);
  for (auto v : values) store(out, v);
  return out;
}

std::vector<std::int32_t> decode_ints(std::string_view bytes) {
  return decode_integers<std::int32_t>(bytes);
}

std::vector<std::uint32_t> decode_tokens(std::string_view bytes) {
  return decode_integers<std::uint32_t>(bytes);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path.string());
}

}  // namespace dubkit::artifacts
