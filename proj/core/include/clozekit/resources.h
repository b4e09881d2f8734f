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

#ifndef CLOZEKIT_RESOURCES_H_
#define CLOZEKIT_RESOURCES_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace clozekit {

// Built-in word lists (copies of core/data/*.txt compiled into the library).
std::string_view DefaultAbbreviationsText();
std::string_view DefaultHonorificsText();
std::string_view DefaultStopwordsText();
std::string_view DefaultNounsText();

// Parses a one-entry-per-line list. Blank lines and lines starting with '#'
// are skipped; surrounding whitespace is trimmed.
std::vector<std::string> ParseWordList(std::string_view text);

// Reads a whole file as bytes. Throws IoError naming the path on failure.
std::string ReadFile(const std::filesystem::path& path);

std::vector<std::string> ReadWordList(const std::filesystem::path& path);

}  // namespace clozekit

#endif  // CLOZEKIT_RESOURCES_H_
