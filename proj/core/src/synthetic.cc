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

#include "clozekit/synthetic.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "clozekit/error.h"
#include "clozekit/random.h"

namespace clozekit {
namespace {

constexpr std::size_t kSentenceLength = 6;

// k distinct values from [0, n), in draw order.
std::vector<std::size_t> Sample(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.UniformIndex(n - i)]);
  pool.resize(k);
  return pool;
}

std::vector<Sentence> Chunk(const std::vector<std::string>& tokens) {
  std::vector<Sentence> sentences;
  for (std::size_t i = 0; i < tokens.size(); i += kSentenceLength) {
    const std::size_t end = std::min(tokens.size(), i + kSentenceLength);
    sentences.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                           tokens.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return sentences;
}

ClozeExample RepeatedToken(const SyntheticOptions& o, Rng& rng) {
  const auto words = Sample(rng, o.word_pool, kNumCandidates);
  std::vector<std::string> tokens;
  for (std::size_t w : words) tokens.push_back("w" + std::to_string(w));
  const std::string answer = tokens[rng.UniformIndex(tokens.size())];
  tokens.push_back(answer);
  const std::size_t fillers = rng.UniformIndex(o.max_fillers + 1);
  for (std::size_t i = 0; i < fillers; ++i) {
    tokens.push_back("f" + std::to_string(rng.UniformIndex(o.filler_pool)));
  }
  rng.Shuffle(std::span<std::string>(tokens));

  ClozeExample ex;
  ex.context = Chunk(tokens);
  ex.question = {"which", "word", "repeats", std::string(kGapTag)};
  ex.answer = answer;
  for (std::size_t w : words) ex.candidates.push_back("w" + std::to_string(w));
  rng.Shuffle(std::span<std::string>(ex.candidates));
  return ex;
}

ClozeExample KeyValue(const SyntheticOptions& o, Rng& rng) {
  const auto keys = Sample(rng, o.key_pool, kNumCandidates);
  const auto values = Sample(rng, o.word_pool, kNumCandidates);
  const std::size_t target = rng.UniformIndex(kNumCandidates);

  std::vector<std::string> tokens;
  const std::size_t fillers = rng.UniformIndex(o.max_fillers + 1);
  std::vector<std::size_t> filler_after(kNumCandidates, 0);
  for (std::size_t i = 0; i < fillers; ++i) ++filler_after[rng.UniformIndex(kNumCandidates)];
  for (std::size_t i = 0; i < kNumCandidates; ++i) {
    tokens.push_back("k" + std::to_string(keys[i]));
    tokens.push_back("w" + std::to_string(values[i]));
    for (std::size_t f = 0; f < filler_after[i]; ++f) {
      tokens.push_back("f" + std::to_string(rng.UniformIndex(o.filler_pool)));
    }
  }

  ClozeExample ex;
  ex.context = Chunk(tokens);
  ex.question = {"k" + std::to_string(keys[target]), std::string(kGapTag)};
  ex.answer = "w" + std::to_string(values[target]);
  for (std::size_t v : values) ex.candidates.push_back("w" + std::to_string(v));
  rng.Shuffle(std::span<std::string>(ex.candidates));
  return ex;
}

}  // namespace

std::vector<ClozeExample> MakePointingExamples(const SyntheticOptions& options) {
  if (options.word_pool < kNumCandidates ||
      (options.task == PointingTask::kKeyValue && options.key_pool < kNumCandidates)) {
    throw ValidationError("synthetic pools must hold at least " + std::to_string(kNumCandidates) +
                          " words");
  }
  if (options.filler_pool == 0) throw ValidationError("synthetic filler pool is empty");
  std::vector<ClozeExample> out;
  out.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    Rng rng(MixSeed(options.seed, i));
    ClozeExample ex = options.task == PointingTask::kRepeatedToken ? RepeatedToken(options, rng)
                                                                   : KeyValue(options, rng);
    ex.word_type = WordType::kOther;
    ex.source = {"synthetic", i};
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace clozekit
