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

#include "clozekit/tagger.h"

#include <algorithm>
#include <unordered_set>

#include "clozekit/error.h"
#include "clozekit/resources.h"
#include "clozekit/utf8.h"

namespace clozekit {
namespace {

std::unordered_set<std::string> LowercaseSet(const std::vector<std::string>& words) {
  std::unordered_set<std::string> out;
  for (const auto& w : words) out.insert(utf8::ToLower(w));
  return out;
}

bool HasLowercase(std::string_view token) {
  std::size_t pos = 0;
  while (pos < token.size()) {
    if (utf8::IsLower(utf8::Decode(token, pos))) return true;
  }
  return false;
}

bool IsCapitalized(std::string_view token) {
  if (!utf8::IsUpper(utf8::First(token))) return false;
  // All-caps words ("CHAPTER") are headings or emphasis, not names.
  return utf8::Length(token) == 1 || HasLowercase(token);
}

bool IsWordLike(std::string_view token) {
  std::size_t pos = 0;
  while (pos < token.size()) {
    const char32_t cp = utf8::Decode(token, pos);
    if (utf8::IsLetter(cp) || utf8::IsDigit(cp)) return true;
  }
  return false;
}

bool IsOpeningMark(std::string_view token) {
  return token == "\"" || token == "'" || token == "`" || token == "(" ||
         token == "[" || token == "“" || token == "‘";
}

// Sentence-initial in the capitalization sense.
std::vector<bool> InitialPositions(const Sentence& sentence) {
  std::vector<bool> initial(sentence.size(), false);
  bool seen_word = false;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    initial[i] = !seen_word || (i > 0 && IsOpeningMark(sentence[i - 1]));
    if (IsWordLike(sentence[i])) seen_word = true;
  }
  return initial;
}

std::vector<std::string> SplitWhitespace(std::string_view line) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    if (end > pos) parts.emplace_back(line.substr(pos, end - pos));
    pos = end;
  }
  return parts;
}

}  // namespace

std::string_view WordTypeTag(WordType type) {
  switch (type) {
    case WordType::kNamedEntity:
      return "NE";
    case WordType::kCommonNoun:
      return "CN";
    case WordType::kOther:
      return "O";
  }
  return "O";
}

std::optional<WordType> ParseWordTypeTag(std::string_view tag) {
  if (tag == "NE") return WordType::kNamedEntity;
  if (tag == "CN") return WordType::kCommonNoun;
  if (tag == "O") return WordType::kOther;
  return std::nullopt;
}

std::optional<WordType> ParseWordTypeName(std::string_view name) {
  const std::string lower = utf8::ToLower(name);
  if (lower == "ne") return WordType::kNamedEntity;
  if (lower == "cn") return WordType::kCommonNoun;
  if (lower == "o") return WordType::kOther;
  return std::nullopt;
}

bool LabelsAligned(const TokenizedBook& book, const BookLabels& labels) {
  if (labels.size() != book.sentences.size()) return false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].size() != book.sentences[i].size()) return false;
  }
  return true;
}

TaggerConfig TaggerConfig::Default() {
  TaggerConfig config;
  config.noun_lexicon = LowercaseSet(ParseWordList(DefaultNounsText()));
  config.stopwords = LowercaseSet(ParseWordList(DefaultStopwordsText()));
  config.honorifics = LowercaseSet(ParseWordList(DefaultHonorificsText()));
  return config;
}

TaggerConfig TaggerConfig::FromFiles(const std::filesystem::path& nouns,
                                     const std::filesystem::path& stopwords,
                                     const std::filesystem::path& honorifics) {
  TaggerConfig config = Default();
  if (!nouns.empty()) config.noun_lexicon = LowercaseSet(ReadWordList(nouns));
  if (!stopwords.empty()) config.stopwords = LowercaseSet(ReadWordList(stopwords));
  if (!honorifics.empty()) config.honorifics = LowercaseSet(ReadWordList(honorifics));
  config.Validate();
  return config;
}

void TaggerConfig::Validate() const {
  if (noun_lexicon.empty()) throw ValidationError("noun lexicon is empty");
}

HeuristicTagger::HeuristicTagger(TaggerConfig config) : config_(std::move(config)) {
  config_.Validate();
}

bool HeuristicTagger::IsStopword(std::string_view token) const {
  return config_.stopwords.contains(utf8::ToLower(token));
}

bool HeuristicTagger::IsHonorific(std::string_view token) const {
  std::string lower = utf8::ToLower(token);
  if (lower.ends_with('.')) lower.pop_back();
  return config_.honorifics.contains(lower);
}

BookLabels HeuristicTagger::Tag(const TokenizedBook& book) const {
  std::vector<std::vector<bool>> initial;
  initial.reserve(book.sentences.size());
  std::unordered_set<std::string_view> corroborated;
  for (const auto& sentence : book.sentences) {
    initial.push_back(InitialPositions(sentence));
    for (std::size_t j = 0; j < sentence.size(); ++j) {
      if (!initial.back()[j] && IsCapitalized(sentence[j])) {
        corroborated.insert(sentence[j]);
      }
    }
  }

  BookLabels labels(book.sentences.size());
  for (std::size_t i = 0; i < book.sentences.size(); ++i) {
    const auto& sentence = book.sentences[i];
    labels[i].assign(sentence.size(), WordType::kOther);
    for (std::size_t j = 0; j < sentence.size(); ++j) {
      const std::string& token = sentence[j];
      if (IsStopword(token)) continue;
      if (IsCapitalized(token)) {
        if (!IsHonorific(token) && corroborated.contains(token)) {
          labels[i][j] = WordType::kNamedEntity;
        }
      } else if (utf8::IsLower(utf8::First(token)) &&
                 config_.noun_lexicon.contains(token)) {
        labels[i][j] = WordType::kCommonNoun;
      }
    }
  }
  return labels;
}

PretaggedTagger PretaggedTagger::FromDirectory(const std::filesystem::path& directory) {
  std::error_code ec;
  if (!std::filesystem::is_directory(directory, ec)) {
    throw IoError("not a directory: " + directory.string());
  }
  PretaggedTagger tagger;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tags") {
      tagger.Add(entry.path().stem().string(), ReadFile(entry.path()));
    }
  }
  return tagger;
}

void PretaggedTagger::Add(const std::string& book_id, std::string_view text) {
  std::vector<std::vector<WordType>> sentences;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    pos = end + 1;
    std::vector<WordType> labels;
    for (const auto& item : SplitWhitespace(line)) {
      const auto slash = item.rfind('/');
      std::optional<WordType> type;
      if (slash != std::string::npos && slash > 0) {
        type = ParseWordTypeTag(std::string_view(item).substr(slash + 1));
      }
      if (!type) {
        throw ParseError(book_id + ".tags", line_no,
                         "expected token/TAG with TAG in {NE, CN, O}, got '" + item + "'");
      }
      labels.push_back(*type);
    }
    sentences.push_back(std::move(labels));
  }
  books_[book_id] = std::move(sentences);
}

BookLabels PretaggedTagger::Tag(const TokenizedBook& book) const {
  const auto it = books_.find(book.book_id);
  if (it == books_.end()) {
    throw AlignmentError("no pre-tagged labels for book '" + book.book_id + "'");
  }
  const auto& labels = it->second;
  if (labels.size() != book.sentences.size()) {
    const std::size_t index = std::min(labels.size(), book.sentences.size());
    throw AlignmentError("book '" + book.book_id + "' sentence " + std::to_string(index) +
                         ": pre-tagged data has " + std::to_string(labels.size()) +
                         " sentences, book has " + std::to_string(book.sentences.size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].size() != book.sentences[i].size()) {
      throw AlignmentError("book '" + book.book_id + "' sentence " + std::to_string(i) +
                           ": " + std::to_string(labels[i].size()) + " labels for " +
                           std::to_string(book.sentences[i].size()) + " tokens");
    }
  }
  return labels;
}

std::string FormatPretagged(const TokenizedBook& book, const BookLabels& labels) {
  if (!LabelsAligned(book, labels)) {
    throw AlignmentError("labels not aligned with book '" + book.book_id + "'");
  }
  std::string out;
  for (std::size_t i = 0; i < book.sentences.size(); ++i) {
    for (std::size_t j = 0; j < book.sentences[i].size(); ++j) {
      if (j > 0) out.push_back(' ');
      out += book.sentences[i][j];
      out.push_back('/');
      out += WordTypeTag(labels[i][j]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace clozekit
