// Copyright 2026 The Clozekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clozekit/utf8.h"

namespace clozekit::utf8 {
namespace {

bool IsContinuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Returns the decoded code point and its byte length, or length 0 when the
// sequence at `pos` is malformed.
std::pair<char32_t, std::size_t> DecodeAt(std::string_view text,
                                          std::size_t pos) {
  const auto c0 = static_cast<unsigned char>(text[pos]);
  if (c0 < 0x80) return {c0, 1};
  std::size_t len;
  char32_t cp;
  char32_t min;
  if ((c0 & 0xE0) == 0xC0) {
    len = 2, cp = c0 & 0x1F, min = 0x80;
  } else if ((c0 & 0xF0) == 0xE0) {
    len = 3, cp = c0 & 0x0F, min = 0x800;
  } else if ((c0 & 0xF8) == 0xF0) {
    len = 4, cp = c0 & 0x07, min = 0x10000;
  } else {
    return {kReplacement, 0};
  }
  if (pos + len > text.size()) return {kReplacement, 0};
  for (std::size_t i = 1; i < len; ++i) {
    const auto c = static_cast<unsigned char>(text[pos + i]);
    if (!IsContinuation(c)) return {kReplacement, 0};
    cp = (cp << 6) | (c & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    return {kReplacement, 0};
  }
  return {cp, len};
}

}  // namespace

bool IsValid(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto [cp, len] = DecodeAt(text, pos);
    if (len == 0) return false;
    pos += len;
  }
  return true;
}

char32_t Decode(std::string_view text, std::size_t& pos) {
  auto [cp, len] = DecodeAt(text, pos);
  pos += len == 0 ? 1 : len;
  return cp;
}

char32_t DecodeBefore(std::string_view text, std::size_t end,
                      std::size_t& begin) {
  std::size_t start = end;
  int back = 0;
  do {
    --start;
    ++back;
  } while (start > 0 && back < 4 &&
           IsContinuation(static_cast<unsigned char>(text[start])));
  auto [cp, len] = DecodeAt(text, start);
  if (len == 0 || start + len != end) {
    begin = end - 1;
    return kReplacement;
  }
  begin = start;
  return cp;
}

void Append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool IsUpper(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return true;
  if (cp >= 0xC0 && cp <= 0xDE) return cp != 0xD7;
  // Latin Extended-A pairs upper/lower on even/odd code points, with a few
  // ranges shifted by one.
  if (cp >= 0x100 && cp <= 0x137) return cp % 2 == 0;
  if (cp >= 0x139 && cp <= 0x148) return cp % 2 == 1;
  if (cp >= 0x14A && cp <= 0x177) return cp % 2 == 0;
  if (cp == 0x178) return true;
  if (cp >= 0x179 && cp <= 0x17E) return cp % 2 == 1;
  return false;
}

bool IsLower(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return true;
  if (cp >= 0xDF && cp <= 0xFF) return cp != 0xF7;
  if (cp >= 0x100 && cp <= 0x137) return cp % 2 == 1;
  if (cp == 0x138) return true;
  if (cp >= 0x139 && cp <= 0x148) return cp % 2 == 0;
  if (cp == 0x149) return true;
  if (cp >= 0x14A && cp <= 0x177) return cp % 2 == 1;
  if (cp >= 0x179 && cp <= 0x17E) return cp % 2 == 0;
  if (cp == 0x17F) return true;
  return false;
}

bool IsSpace(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\f' || cp == U'\v' || cp == 0xA0;
}

char32_t ToLower(char32_t cp) {
  if (!IsUpper(cp)) return cp;
  if (cp <= U'Z') return cp + 0x20;
  if (cp <= 0xDE) return cp + 0x20;
  if (cp == 0x178) return 0xFF;
  return cp + 1;
}

std::string ToLower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) Append(out, ToLower(Decode(text, pos)));
  return out;
}

char32_t First(std::string_view text) {
  if (text.empty()) return 0;
  std::size_t pos = 0;
  return Decode(text, pos);
}

std::size_t Length(std::string_view text) {
  std::size_t pos = 0;
  std::size_t n = 0;
  while (pos < text.size()) {
    Decode(text, pos);
    ++n;
  }
  return n;
}

}  // namespace clozekit::utf8
