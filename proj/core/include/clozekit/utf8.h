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

// Small, locale-independent UTF-8 helpers. Letter-case classification covers
// ASCII, Latin-1 Supplement and Latin Extended-A, which is what English
// prose from public-domain books needs.

#ifndef CLOZEKIT_UTF8_H_
#define CLOZEKIT_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace clozekit::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Strict validation: rejects overlong forms, surrogates and values > U+10FFFF.
bool IsValid(std::string_view text);

// Decodes the code point starting at `pos` and advances `pos` past it.
// Malformed input yields kReplacement and advances by one byte.
char32_t Decode(std::string_view text, std::size_t& pos);

// Code point that ends at byte `end` (exclusive); sets `begin` to its start.
char32_t DecodeBefore(std::string_view text, std::size_t end,
                      std::size_t& begin);

void Append(std::string& out, char32_t cp);

bool IsUpper(char32_t cp);
bool IsLower(char32_t cp);
inline bool IsLetter(char32_t cp) { return IsUpper(cp) || IsLower(cp); }
inline bool IsDigit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }
bool IsSpace(char32_t cp);

char32_t ToLower(char32_t cp);
std::string ToLower(std::string_view text);

// First code point of `text`, or 0 when empty.
char32_t First(std::string_view text);

// Number of code points.
std::size_t Length(std::string_view text);

}  // namespace clozekit::utf8

#endif  // CLOZEKIT_UTF8_H_
