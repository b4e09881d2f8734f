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

#ifndef CLOZEKIT_TAGGER_H_
#define CLOZEKIT_TAGGER_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "clozekit/corpus.h"

namespace clozekit {

enum class WordType { kNamedEntity, kCommonNoun, kOther };

// "NE", "CN", "O".
std::string_view WordTypeTag(WordType type);
std::optional<WordType> ParseWordTypeTag(std::string_view tag);
// "ne"/"cn" as used on the command line (case-insensitive); also accepts the
// tags above.
std::optional<WordType> ParseWordTypeName(std::string_view name);

// One label per token, shaped like TokenizedBook::sentences.
using BookLabels = std::vector<std::vector<WordType>>;

// True when `labels` has exactly one entry per token of `book`.
bool LabelsAligned(const TokenizedBook& book, const BookLabels& labels);

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual BookLabels Tag(const TokenizedBook& book) const = 0;
};

struct TaggerConfig {
  std::unordered_set<std::string> noun_lexicon;  // lowercase
  std::unordered_set<std::string> stopwords;     // lowercase
  std::unordered_set<std::string> honorifics;    // lowercase, no period

  // Built-in lists.
  static TaggerConfig Default();
  // Any empty path falls back to the built-in list for that field.
  static TaggerConfig FromFiles(const std::filesystem::path& nouns,
                                const std::filesystem::path& stopwords,
                                const std::filesystem::path& honorifics);

  // Throws ValidationError when the noun lexicon is empty.
  void Validate() const;
};

// Capitalization and lexicon heuristics.
//
// A token is a NamedEntity when it is capitalized, is not a stopword or
// honorific, and the same surface form occurs capitalized at a non-initial
// position somewhere in the book. A position is initial when every earlier
// token in the sentence is punctuation or the previous token is an opening
// quote/bracket. A token is a CommonNoun when it starts with a lowercase
// letter, is not a stopword, and is in the noun lexicon. Everything else,
// and every stopword, is Other.
class HeuristicTagger : public Tagger {
 public:
  explicit HeuristicTagger(TaggerConfig config);

  BookLabels Tag(const TokenizedBook& book) const override;

  const TaggerConfig& config() const { return config_; }

 private:
  bool IsStopword(std::string_view token) const;
  bool IsHonorific(std::string_view token) const;

  TaggerConfig config_;
};

// Reads labels prepared by an external tagger.
//
// Format: one file per book, "<book_id>.tags" in a directory, or registered
// directly as text. One line per sentence, tokens written as `token/TAG` with
// TAG in {NE, CN, O}; the tag is taken after the last '/'.
class PretaggedTagger : public Tagger {
 public:
  PretaggedTagger() = default;

  static PretaggedTagger FromDirectory(const std::filesystem::path& directory);

  void Add(const std::string& book_id, std::string_view text);

  // Throws AlignmentError naming the book and sentence index when the
  // pre-tagged data does not line up with the tokenized book.
  BookLabels Tag(const TokenizedBook& book) const override;

 private:
  std::map<std::string, std::vector<std::vector<WordType>>, std::less<>> books_;
};

// Writes labels in the pre-tagged format.
std::string FormatPretagged(const TokenizedBook& book, const BookLabels& labels);

}  // namespace clozekit

#endif  // CLOZEKIT_TAGGER_H_
