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

#include "clozekit/clozegen.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "clozekit/error.h"
#include "clozekit/random.h"
#include "clozekit/utf8.h"

namespace clozekit {
namespace {

bool Contains(const Sentence& sentence, std::string_view token) {
  return std::find(sentence.begin(), sentence.end(), token) != sentence.end();
}

}  // namespace

std::size_t ClozeExample::ContextTokenCount() const {
  std::size_t n = 0;
  for (const auto& s : context) n += s.size();
  return n;
}

bool SameContent(const ClozeExample& a, const ClozeExample& b) {
  return a.context == b.context && a.question == b.question && a.answer == b.answer &&
         a.candidates == b.candidates;
}

std::vector<std::string> CheckExample(const ClozeExample& example,
                                      std::size_t expected_window) {
  std::vector<std::string> problems;
  if (expected_window != 0 && example.context.size() != expected_window) {
    problems.push_back("context has " + std::to_string(example.context.size()) +
                       " sentences, expected " + std::to_string(expected_window));
  }
  const auto gaps = std::count(example.question.begin(), example.question.end(), kGapTag);
  if (gaps != 1) {
    problems.push_back("question has " + std::to_string(gaps) + " gap tags");
  }
  if (example.answer.empty()) problems.push_back("empty answer");
  if (example.candidates.size() != kNumCandidates) {
    problems.push_back("expected " + std::to_string(kNumCandidates) + " candidates, got " +
                       std::to_string(example.candidates.size()));
  }
  std::unordered_set<std::string_view> distinct(example.candidates.begin(),
                                                example.candidates.end());
  if (distinct.size() != example.candidates.size()) {
    problems.push_back("duplicate candidates");
  }
  if (!distinct.contains(example.answer)) {
    problems.push_back("answer '" + example.answer + "' not among candidates");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& s : example.context) seen.insert(s.begin(), s.end());
  if (!seen.contains(example.answer)) {
    problems.push_back("answer '" + example.answer + "' not in context");
  }
  seen.insert(example.question.begin(), example.question.end());
  for (const auto& c : example.candidates) {
    if (!seen.contains(c)) {
      problems.push_back("candidate '" + c + "' not in context or question");
    }
  }
  return problems;
}

GenerationReport& GenerationReport::operator+=(const GenerationReport& other) {
  examined += other.examined;
  emitted += other.emitted;
  skipped_no_repeat += other.skipped_no_repeat;
  skipped_small_pool += other.skipped_small_pool;
  return *this;
}

std::uint64_t CandidateSeed(std::uint64_t seed, const ExampleSource& source) {
  return MixSeed(MixSeed(seed, source.book_id), source.sentence_index);
}

std::optional<std::vector<std::string>> SelectCandidates(
    const std::vector<Sentence>& context, const BookLabels& context_labels,
    const std::string& answer, WordType target_type, std::uint64_t seed,
    const ExampleSource& source) {
  if (context_labels.size() != context.size()) {
    throw AlignmentError("context labels do not match context");
  }
  std::set<std::string> pool;
  bool answer_seen = false;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (context_labels[i].size() != context[i].size()) {
      throw AlignmentError("context labels do not match sentence " + std::to_string(i));
    }
    for (std::size_t j = 0; j < context[i].size(); ++j) {
      const auto& token = context[i][j];
      if (token == answer) {
        answer_seen = true;
      } else if (context_labels[i][j] == target_type) {
        pool.insert(token);
      }
    }
  }
  if (!answer_seen) {
    throw ValidationError("answer '" + answer + "' does not occur in the context");
  }
  constexpr std::size_t kDistractors = kNumCandidates - 1;
  if (pool.size() < kDistractors) return std::nullopt;

  std::vector<std::string> forms(pool.begin(), pool.end());
  Rng rng(CandidateSeed(seed, source));
  for (std::size_t k = 0; k < kDistractors; ++k) {
    const std::size_t j = k + rng.UniformIndex(forms.size() - k);
    std::swap(forms[k], forms[j]);
  }
  std::vector<std::string> candidates;
  candidates.reserve(kNumCandidates);
  candidates.push_back(answer);
  candidates.insert(candidates.end(), forms.begin(), forms.begin() + kDistractors);
  rng.Shuffle(std::span(candidates));
  return candidates;
}

GenerationResult GenerateFromBook(const TokenizedBook& book, const BookLabels& labels,
                                  WordType target_type,
                                  const GenerationOptions& options) {
  if (!LabelsAligned(book, labels)) {
    throw AlignmentError("labels not aligned with book '" + book.book_id + "'");
  }
  if (options.window == 0) throw ValidationError("window must be at least 1");
  if (options.stride == 0) throw ValidationError("stride must be at least 1");

  const auto& sentences = book.sentences;
  std::vector<std::unordered_set<std::string_view>> token_sets;
  token_sets.reserve(sentences.size());
  for (const auto& s : sentences) token_sets.emplace_back(s.begin(), s.end());

  GenerationResult result;
  for (std::size_t i = options.window; i < sentences.size(); i += options.stride) {
    ++result.report.examined;
    const auto& sentence = sentences[i];

    std::optional<std::size_t> best_position;
    std::size_t best_last_seen = 0;
    if (!Contains(sentence, kGapTag)) {
      for (std::size_t j = 0; j < sentence.size(); ++j) {
        if (labels[i][j] != target_type) continue;
        for (std::size_t k = i; k-- > i - options.window;) {
          if (!token_sets[k].contains(sentence[j])) continue;
          if (!best_position || k < best_last_seen) {
            best_position = j;
            best_last_seen = k;
          }
          break;
        }
      }
    }
    if (!best_position) {
      ++result.report.skipped_no_repeat;
      continue;
    }

    ClozeExample example;
    example.source = {book.book_id, i};
    example.word_type = target_type;
    example.answer = sentence[*best_position];
    example.context.assign(sentences.begin() + static_cast<std::ptrdiff_t>(i - options.window),
                           sentences.begin() + static_cast<std::ptrdiff_t>(i));
    const BookLabels context_labels(labels.begin() + static_cast<std::ptrdiff_t>(i - options.window),
                                    labels.begin() + static_cast<std::ptrdiff_t>(i));
    auto candidates = SelectCandidates(example.context, context_labels, example.answer,
                                       target_type, options.seed, example.source);
    if (!candidates) {
      ++result.report.skipped_small_pool;
      continue;
    }
    example.candidates = std::move(*candidates);
    example.question = sentence;
    example.question[*best_position] = std::string(kGapTag);
    result.examples.push_back(std::move(example));
    ++result.report.emitted;
  }
  return result;
}

SplitSpec SplitBooks(const std::vector<RawBook>& books, const SplitFractions& fractions,
                     std::uint64_t seed) {
  const std::array<double, 3> f = {fractions.train, fractions.valid, fractions.test};
  if (std::any_of(f.begin(), f.end(), [](double x) { return !(x >= 0.0); })) {
    throw ValidationError("split fractions must be non-negative");
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  const auto nonzero = static_cast<std::size_t>(
      std::count_if(f.begin(), f.end(), [](double x) { return x > 0.0; }));
  const std::size_t n = books.size();
  if (n < nonzero) {
    throw ValidationError("cannot split " + std::to_string(n) + " books into " +
                          std::to_string(nonzero) + " non-empty sets");
  }

  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& b : books) ids.push_back(b.book_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ValidationError("duplicate book ids");
  }
  Rng rng(seed);
  rng.Shuffle(std::span(ids));

  // Largest-remainder apportionment.
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(n) * f[i];
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    if (f[order[k]] > 0.0) {
      ++counts[order[k]];
      ++assigned;
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (f[i] > 0.0 && counts[i] == 0) {
      const auto donor = static_cast<std::size_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      --counts[donor];
      ++counts[i];
    }
  }

  SplitSpec spec;
  auto begin = ids.begin();
  spec.train_books.assign(begin, begin + static_cast<std::ptrdiff_t>(counts[0]));
  begin += static_cast<std::ptrdiff_t>(counts[0]);
  spec.valid_books.assign(begin, begin + static_cast<std::ptrdiff_t>(counts[1]));
  begin += static_cast<std::ptrdiff_t>(counts[1]);
  spec.test_books.assign(begin, ids.end());
  return spec;
}

std::string NormalizeTitle(std::string_view title) {
  std::string spaced;
  std::size_t pos = 0;
  while (pos < title.size()) {
    const char32_t cp = utf8::Decode(title, pos);
    if (utf8::IsLetter(cp) || utf8::IsDigit(cp)) {
      utf8::Append(spaced, utf8::ToLower(cp));
    } else if (cp != U'\'' && cp != 0x2019) {
      spaced.push_back(' ');
    }
  }
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < spaced.size()) {
    while (i < spaced.size() && spaced[i] == ' ') ++i;
    std::size_t j = i;
    while (j < spaced.size() && spaced[j] != ' ') ++j;
    if (j > i) words.push_back(spaced.substr(i, j - i));
    i = j;
  }
  if (words.size() > 1 && (words[0] == "the" || words[0] == "a" || words[0] == "an")) {
    words.erase(words.begin());
  }
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

DedupResult DedupEditions(std::vector<RawBook> books,
                          const std::vector<std::string>& blocklist_titles) {
  std::unordered_set<std::string> blocked;
  for (const auto& t : blocklist_titles) {
    std::string norm = NormalizeTitle(t);
    if (!norm.empty()) blocked.insert(std::move(norm));
  }
  DedupResult result;
  for (auto& book : books) {
    if (blocked.contains(NormalizeTitle(book.title))) {
      result.removed.push_back(std::move(book));
    } else {
      result.kept.push_back(std::move(book));
    }
  }
  return result;
}

DatasetStats ComputeStats(const std::vector<ClozeExample>& dataset) {
  DatasetStats stats;
  stats.n_queries = dataset.size();
  if (dataset.empty()) return stats;
  std::size_t total_options = 0;
  std::size_t total_tokens = 0;
  std::unordered_set<std::string_view> vocab;
  for (const auto& ex : dataset) {
    stats.max_options = std::max(stats.max_options, ex.candidates.size());
    total_options += ex.candidates.size();
    total_tokens += ex.TokenCount();
    for (const auto& s : ex.context) vocab.insert(s.begin(), s.end());
    vocab.insert(ex.question.begin(), ex.question.end());
  }
  const auto n = static_cast<double>(dataset.size());
  stats.avg_options = static_cast<double>(total_options) / n;
  stats.avg_tokens = static_cast<double>(total_tokens) / n;
  stats.vocab_size = vocab.size();
  return stats;
}

}  // namespace clozekit
