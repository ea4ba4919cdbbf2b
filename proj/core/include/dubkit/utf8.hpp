// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace dubkit::utf8 {

/// Invalid or truncated sequences decode to U+FFFD, one per bad byte.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
void append(std::string& out, char32_t c);

bool is_cjk(char32_t c);
bool is_space(char32_t c);

}  // namespace dubkit::utf8
