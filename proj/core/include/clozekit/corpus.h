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

// Book ingestion, boilerplate removal, sentence segmentation and
// tokenization.
//
// Sentence rules:
//   * A run of '.', '!', '?' (optionally followed by closing quotes or
//     brackets) ends a sentence when it is followed by whitespace and then an
//     uppercase letter, an opening quote or an opening bracket, or by the end
//     of the text.
//   * A '.' does not end a sentence when the word it terminates is in the
//     abbreviation list ("Mr.", "Dr.", ...) or is a single uppercase initial
//     other than "I".
//   * A blank line (paragraph break) always ends a sentence.
//
// Token rules (applied to each whitespace-separated chunk):
//   * Chunks that are abbreviations, contraction clitics ("n't", "'s", ...),
//     or dotted acronyms ("U.S.") are kept whole.
//   * Dashes ("--", en and em dash) split a chunk and become tokens.
//   * Leading quotes/brackets and trailing punctuation (. , ; : ! ? quotes,
//     closing brackets) are split off one character at a time; "..." stays
//     one token.
//   * English contractions split before the clitic: "don't" -> "do" "n't",
//     "he's" -> "he" "'s"; both straight and curly apostrophes count.

#ifndef CLOZEKIT_CORPUS_H_
#define CLOZEKIT_CORPUS_H_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace clozekit {

using Sentence = std::vector<std::string>;

struct RawBook {
  std::string book_id;
  std::string title;
  std::string text;
};

struct TokenizedBook {
  std::string book_id;
  std::vector<Sentence> sentences;

  std::size_t TokenCount() const;
};

// Lines that start (after leading whitespace) with one of these prefixes
// delimit the body of a book.
struct BoilerplateMarkers {
  std::vector<std::string> start{"*** START"};
  std::vector<std::string> end{"*** END"};

  // File format: one marker per line, "start <prefix>" or "end <prefix>".
  static BoilerplateMarkers FromFile(const std::filesystem::path& path);
};

// Keeps the text between the first start-marker line and the last
// end-marker line. Missing markers leave that side untouched.
std::string StripBoilerplate(std::string_view text,
                             const BoilerplateMarkers& markers = {});

enum class IdScheme {
  kFileStem,  // "moby_dick.txt" -> "moby_dick"
  kFileName,  // "moby_dick.txt" -> "moby_dick.txt"
};

struct IngestOptions {
  IdScheme id_scheme = IdScheme::kFileStem;
  BoilerplateMarkers markers;
  std::string extension = ".txt";
};

struct IngestError {
  std::filesystem::path file;
  std::string message;
};

struct IngestResult {
  std::vector<RawBook> books;  // sorted by book_id
  std::vector<IngestError> errors;
};

// Reads every file with the configured extension in `directory`. Unreadable,
// non-UTF-8 or empty-after-stripping files are recorded as errors and
// skipped. CRLF line endings are normalized to LF. Throws IoError if the
// directory is missing and EmptyCorpusError if it holds no candidate files.
IngestResult IngestBooks(const std::filesystem::path& directory,
                         const IngestOptions& options = {});

class Abbreviations {
 public:
  Abbreviations() = default;
  explicit Abbreviations(std::vector<std::string> entries);

  static const Abbreviations& Default();
  static Abbreviations FromFile(const std::filesystem::path& path);

  bool Contains(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::set<std::string, std::less<>> entries_;
};

std::vector<std::string> SplitSentences(
    std::string_view text,
    const Abbreviations& abbreviations = Abbreviations::Default());

std::vector<std::string> Tokenize(
    std::string_view sentence,
    const Abbreviations& abbreviations = Abbreviations::Default());

// Splits and tokenizes a book; sentences without tokens are dropped.
TokenizedBook TokenizeBook(
    const RawBook& book,
    const Abbreviations& abbreviations = Abbreviations::Default());

}  // namespace clozekit

#endif  // CLOZEKIT_CORPUS_H_
