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

#ifndef CLOZEKIT_VOCAB_H_
#define CLOZEKIT_VOCAB_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clozekit/clozegen.h"

namespace clozekit {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kGapId = 1;
inline constexpr TokenId kFirstAnonymousId = 2;
inline constexpr std::size_t kNumAnonymous = 1000;
inline constexpr TokenId kFirstWordId = kFirstAnonymousId + static_cast<TokenId>(kNumAnonymous);
inline constexpr std::size_t kDefaultVocabCap = 200000;

inline bool IsAnonymousId(TokenId id) {
  return id >= kFirstAnonymousId && id < kFirstWordId;
}

// Frequency-capped word list plus the reserved block: padding (0), gap tag
// (1) and 1000 anonymous out-of-vocabulary slots (2..1001). Words take ids
// from 1002 in descending frequency order.
class Vocabulary {
 public:
  Vocabulary() = default;
  // `words` in id order; they must be distinct and exclude the gap tag.
  explicit Vocabulary(std::vector<std::string> words);

  // Total id count including the reserved block.
  std::size_t size() const { return kFirstWordId + words_.size(); }
  std::size_t word_count() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  std::optional<TokenId> Find(std::string_view token) const;
  // Word or reserved token for an id ("<pad>", "XXXXX", "<anon17>").
  std::string Token(TokenId id) const;

  // Text form: three header lines then one word per line in id order.
  std::string Serialize() const;
  static Vocabulary Deserialize(std::string_view text);
  void Save(const std::filesystem::path& path) const;
  static Vocabulary Load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
};

// Counts context and question tokens (the gap tag excluded), keeps the `cap`
// most frequent with ties broken by byte order. Throws ValidationError when
// the corpus has no tokens or cap is 0.
Vocabulary BuildVocab(const std::vector<ClozeExample>& examples,
                      std::size_t cap = kDefaultVocabCap);

struct EncodedExample {
  std::vector<TokenId> context;  // sentences concatenated
  std::vector<std::size_t> sentence_lengths;
  std::vector<TokenId> question;
  TokenId answer = kPadId;
  std::vector<TokenId> candidates;
  std::map<std::string, TokenId> oov_map;  // surface form -> anonymous id
  WordType word_type = WordType::kOther;
};

// Maps in-vocabulary tokens to word ids and every distinct out-of-vocabulary
// form to an anonymous id drawn without replacement from the 1000 slots,
// seeded by (seed, example_index). Throws ValidationError when an example
// has more than 1000 distinct unknown forms.
EncodedExample EncodeExample(const ClozeExample& example, const Vocabulary& vocab,
                             std::uint64_t seed, std::size_t example_index);

std::vector<EncodedExample> EncodeAll(const std::vector<ClozeExample>& examples,
                                      const Vocabulary& vocab, std::uint64_t seed);

// Inverse of EncodeExample (word type and provenance are not restored).
ClozeExample DecodeExample(const EncodedExample& encoded, const Vocabulary& vocab);

}  // namespace clozekit

#endif  // CLOZEKIT_VOCAB_H_
