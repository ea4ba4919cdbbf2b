// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>

#include "dubkit/correct.hpp"
#include "dubkit/error.hpp"
#include "dubkit/utf8.hpp"

namespace dubkit::correct {
namespace {

// Traditional -> simplified pairs common in television subtitles.
constexpr std::u32string_view kBuiltinPairs =
    U"這这個个們们來来說说時时會会為为對对國国學学還还後后麼么過过見见從从開开樣样沒没"
    U"現现點点長长問问讓让給给覺觉頭头聽听氣气無无話话愛爱東东車车門门邊边錢钱電电謝谢"
    U"請请號号書书買买賣卖親亲應应處处間间關关發发經经歲岁媽妈爺爷兒儿寫写體体難难飛飞"
    U"風风語语認认識识讀读業业場场張张馬马魚鱼鳥鸟龍龙歡欢樂乐萬万與与幾几裡里裏里義义"
    U"嗎吗誰谁員员師师傳传記记實实寶宝驗验廣广黃黄綠绿紅红藍蓝";

// Full-width forms and CJK punctuation folded to their ASCII counterparts.
char32_t fold_width(char32_t c) {
  if (c >= 0xFF01 && c <= 0xFF5E) return c - 0xFEE0;
  switch (c) {
    case 0x3000: return U' ';
    case 0x3002: return U'.';   // 。
    case 0x3001: return U',';   // 、
    case 0x201C:
    case 0x201D: return U'"';
    case 0x2018:
    case 0x2019: return U'\'';
    default: return c;
  }
}

char32_t fold_digit(char32_t c) {
  for (char32_t zero : {0x0660u, 0x06F0u, 0x0966u, 0x09E6u, 0x0E50u}) {
    if (c >= zero && c <= zero + 9) return U'0' + (c - zero);
  }
  return c;
}

bool reserved(char32_t c) { return c < 0x80 || fold_width(c) != c || fold_digit(c) != c; }

}  // namespace

NormalizationTables NormalizationTables::builtin() {
  NormalizationTables t;
  for (std::size_t i = 0; i + 1 < kBuiltinPairs.size(); i += 2) t.add(kBuiltinPairs[i], kBuiltinPairs[i + 1]);
  return t;
}

void NormalizationTables::add(char32_t from, char32_t to) {
  if (from == to) return;
  if (reserved(from) || reserved(to)) {
    throw Error("character map entries may not involve ASCII, full-width or digit characters");
  }
  to = map(to);
  if (to == from) throw Error("character map contains a cycle");
  map_[from] = to;
  for (auto& [k, v] : map_) {
    if (v == from) v = to;
  }
}

void NormalizationTables::load_map_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open character map " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected 'from<TAB>to'");
    const auto from = utf8::decode(std::string_view(line).substr(0, tab));
    auto rest = std::string_view(line).substr(tab + 1);
    rest = rest.substr(0, rest.find(' '));
    const auto to = utf8::decode(rest);
    if (from.size() != 1 || to.empty()) continue;  // phrase entries are not supported
    try {
      add(from[0], to[0]);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
}

char32_t NormalizationTables::map(char32_t c) const {
  const auto it = map_.find(c);
  return it == map_.end() ? c : it->second;
}

std::string normalize_text(std::string_view s, const NormalizationTables& tables) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char32_t c : utf8::decode(s)) {
    c = fold_digit(fold_width(tables.map(c)));
    if (utf8::is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    utf8::append(out, c);
  }
  return out;
}

}  // namespace dubkit::correct
