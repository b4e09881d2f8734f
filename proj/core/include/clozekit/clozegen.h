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

// Cloze example generation from tagged books.

#ifndef CLOZEKIT_CLOZEGEN_H_
#define CLOZEKIT_CLOZEGEN_H_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "clozekit/corpus.h"
#include "clozekit/tagger.h"

namespace clozekit {

inline constexpr std::string_view kGapTag = "XXXXX";
inline constexpr std::size_t kNumCandidates = 10;
inline constexpr std::size_t kDefaultWindow = 20;

struct ExampleSource {
  std::string book_id;
  std::size_t sentence_index = 0;  // 0-based index of the question sentence

  bool operator==(const ExampleSource&) const = default;
};

struct ClozeExample {
  std::vector<Sentence> context;
  Sentence question;
  std::string answer;
  std::vector<std::string> candidates;
  WordType word_type = WordType::kOther;
  ExampleSource source;

  std::size_t ContextTokenCount() const;
  // Context tokens followed by question tokens.
  std::size_t TokenCount() const { return ContextTokenCount() + question.size(); }
};

// Context, question, answer and candidates are equal (provenance and word
// type are ignored). This is the notion of identity the file format keeps.
bool SameContent(const ClozeExample& a, const ClozeExample& b);

// Problems with an example, empty when it satisfies every invariant.
// `expected_window` of 0 skips the context-length check.
std::vector<std::string> CheckExample(const ClozeExample& example,
                                      std::size_t expected_window = kDefaultWindow);

struct GenerationOptions {
  std::size_t window = kDefaultWindow;
  std::size_t stride = 1;
  std::uint64_t seed = 0;
};

struct GenerationReport {
  std::size_t examined = 0;
  std::size_t emitted = 0;
  std::size_t skipped_no_repeat = 0;
  std::size_t skipped_small_pool = 0;

  GenerationReport& operator+=(const GenerationReport& other);
  bool Conserved() const {
    return emitted + skipped_no_repeat + skipped_small_pool == examined;
  }
};

struct GenerationResult {
  std::vector<ClozeExample> examples;
  GenerationReport report;
};

// Builds at most one question per sentence index i >= window (0-based),
// stepping by `stride`. Among tokens of `target_type` in sentence i that
// also occur in sentences i-window..i-1, the one whose most recent earlier
// occurrence lies farthest back is gapped; ties go to the leftmost.
// Throws AlignmentError if `labels` does not match `book`.
GenerationResult GenerateFromBook(const TokenizedBook& book, const BookLabels& labels,
                                  WordType target_type,
                                  const GenerationOptions& options = {});

// Returns the answer plus nine distinct distractors of `target_type` drawn
// from the context, in shuffled order, or nullopt when fewer than nine
// distractors exist. Randomness comes from (seed, book_id, sentence_index).
std::optional<std::vector<std::string>> SelectCandidates(
    const std::vector<Sentence>& context, const BookLabels& context_labels,
    const std::string& answer, WordType target_type, std::uint64_t seed,
    const ExampleSource& source);

// Seed for the candidate stream of one question.
std::uint64_t CandidateSeed(std::uint64_t seed, const ExampleSource& source);

struct SplitSpec {
  std::vector<std::string> train_books;
  std::vector<std::string> valid_books;
  std::vector<std::string> test_books;
  std::set<std::string> blocklist;  // normalized titles
};

struct SplitFractions {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

// Seeded shuffle of book ids cut by the fractions. Every split with a
// nonzero fraction receives at least one book. Throws ValidationError when
// fractions are negative or do not sum to 1, or when there are fewer books
// than nonzero splits.
SplitSpec SplitBooks(const std::vector<RawBook>& books, const SplitFractions& fractions,
                     std::uint64_t seed);

// Casefolds, replaces punctuation by spaces, collapses whitespace and drops a
// leading "the", "a" or "an".
std::string NormalizeTitle(std::string_view title);

struct DedupResult {
  std::vector<RawBook> kept;
  std::vector<RawBook> removed;
};

// Removes books whose normalized title matches a normalized blocklist entry.
DedupResult DedupEditions(std::vector<RawBook> books,
                          const std::vector<std::string>& blocklist_titles);

struct DatasetStats {
  std::size_t n_queries = 0;
  std::size_t max_options = 0;
  double avg_options = 0.0;
  double avg_tokens = 0.0;  // context + question, the gap counting as one
  std::size_t vocab_size = 0;  // distinct context and question tokens
};

DatasetStats ComputeStats(const std::vector<ClozeExample>& dataset);

}  // namespace clozekit

#endif  // CLOZEKIT_CLOZEGEN_H_
