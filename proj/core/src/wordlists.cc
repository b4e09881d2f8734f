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

#include <fstream>
#include <iterator>
#include <sstream>

#include "clozekit/error.h"
#include "clozekit/resources.h"

namespace clozekit {
namespace resources {
extern const char k_abbreviations[];
extern const char k_honorifics[];
extern const char k_stopwords[];
extern const char k_nouns[];
}  // namespace resources

std::string_view DefaultAbbreviationsText() { return resources::k_abbreviations; }
std::string_view DefaultHonorificsText() { return resources::k_honorifics; }
std::string_view DefaultStopwordsText() { return resources::k_stopwords; }
std::string_view DefaultNounsText() { return resources::k_nouns; }

std::vector<std::string> ParseWordList(std::string_view text) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos) {
      const auto last = line.find_last_not_of(" \t\r");
      line = line.substr(first, last - first + 1);
      if (line.front() != '#') words.emplace_back(line);
    }
    pos = end + 1;
  }
  return words;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return std::move(buffer).str();
}

std::vector<std::string> ReadWordList(const std::filesystem::path& path) {
  return ParseWordList(ReadFile(path));
}

}  // namespace clozekit
