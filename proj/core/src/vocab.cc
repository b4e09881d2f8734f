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

#include "clozekit/vocab.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>

#include "clozekit/error.h"
#include "clozekit/random.h"
#include "clozekit/resources.h"

namespace clozekit {
namespace {

constexpr std::string_view kMagicLine = "clozekit-vocab 1";

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty() || words_[i] == kGapTag) {
      throw ValidationError("invalid vocabulary word at position " + std::to_string(i));
    }
    const auto id = static_cast<TokenId>(kFirstWordId + static_cast<TokenId>(i));
    if (!index_.emplace(words_[i], id).second) {
      throw ValidationError("duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  if (token == kGapTag) return kGapId;
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::Token(TokenId id) const {
  if (id == kPadId) return "<pad>";
  if (id == kGapId) return std::string(kGapTag);
  if (IsAnonymousId(id)) return "<anon" + std::to_string(id - kFirstAnonymousId) + ">";
  const auto index = static_cast<std::size_t>(id - kFirstWordId);
  if (id < 0 || index >= words_.size()) {
    throw ValidationError("token id " + std::to_string(id) + " out of range");
  }
  return words_[index];
}

std::string Vocabulary::Serialize() const {
  std::string out;
  out += kMagicLine;
  out += "\nreserved pad=0 gap=1 anonymous=2.." +
         std::to_string(kFirstWordId - 1) + "\nwords " + std::to_string(words_.size()) + "\n";
  for (const auto& w : words_) {
    out += w;
    out.push_back('\n');
  }
  return out;
}

Vocabulary Vocabulary::Deserialize(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.emplace_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  if (lines.size() < 3 || lines[0] != kMagicLine) {
    throw ParseError("vocabulary", 1, "missing 'clozekit-vocab 1' header");
  }
  if (!lines[1].starts_with("reserved ")) {
    throw ParseError("vocabulary", 2, "missing reserved-block line");
  }
  std::size_t count = 0;
  try {
    if (!lines[2].starts_with("words ")) throw std::invalid_argument("words");
    count = std::stoul(lines[2].substr(6));
  } catch (const std::exception&) {
    throw ParseError("vocabulary", 3, "expected 'words <count>'");
  }
  if (lines.size() - 3 != count) {
    throw ParseError("vocabulary", lines.size(),
                     "header announces " + std::to_string(count) + " words, found " +
                         std::to_string(lines.size() - 3));
  }
  return Vocabulary(std::vector<std::string>(lines.begin() + 3, lines.end()));
}

void Vocabulary::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << Serialize();
  if (!out) throw IoError("cannot write " + path.string());
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  return Deserialize(ReadFile(path));
}

Vocabulary BuildVocab(const std::vector<ClozeExample>& examples, std::size_t cap) {
  if (cap == 0) throw ValidationError("vocabulary cap must be at least 1");
  std::unordered_map<std::string, std::size_t> counts;
  auto count = [&](const Sentence& tokens) {
    for (const auto& t : tokens) {
      if (t != kGapTag) ++counts[t];
    }
  };
  for (const auto& ex : examples) {
    for (const auto& s : ex.context) count(s);
    count(ex.question);
  }
  if (counts.empty()) throw ValidationError("cannot build a vocabulary from an empty corpus");

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  const std::size_t keep = std::min(cap, ranked.size());
  auto by_frequency = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), by_frequency);
  std::vector<std::string> words;
  words.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) words.push_back(std::move(ranked[i].first));
  return Vocabulary(std::move(words));
}

EncodedExample EncodeExample(const ClozeExample& example, const Vocabulary& vocab,
                             std::uint64_t seed, std::size_t example_index) {
  EncodedExample encoded;
  encoded.word_type = example.word_type;

  Rng rng(MixSeed(seed, example_index));
  std::array<TokenId, kNumAnonymous> slots;
  std::iota(slots.begin(), slots.end(), kFirstAnonymousId);
  std::size_t used = 0;

  auto encode = [&](const std::string& token) -> TokenId {
    if (auto id = vocab.Find(token)) return *id;
    const auto it = encoded.oov_map.find(token);
    if (it != encoded.oov_map.end()) return it->second;
    if (used == kNumAnonymous) {
      throw ValidationError("example " + std::to_string(example_index) + " (" +
                            example.source.book_id + ":" +
                            std::to_string(example.source.sentence_index) +
                            ") has more than " + std::to_string(kNumAnonymous) +
                            " distinct out-of-vocabulary words");
    }
    const std::size_t pick = used + rng.UniformIndex(kNumAnonymous - used);
    std::swap(slots[used], slots[pick]);
    const TokenId id = slots[used++];
    encoded.oov_map.emplace(token, id);
    return id;
  };

  for (const auto& sentence : example.context) {
    encoded.sentence_lengths.push_back(sentence.size());
    for (const auto& t : sentence) encoded.context.push_back(encode(t));
  }
  for (const auto& t : example.question) encoded.question.push_back(encode(t));
  encoded.answer = encode(example.answer);
  for (const auto& c : example.candidates) encoded.candidates.push_back(encode(c));
  return encoded;
}

std::vector<EncodedExample> EncodeAll(const std::vector<ClozeExample>& examples,
                                      const Vocabulary& vocab, std::uint64_t seed) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out.push_back(EncodeExample(examples[i], vocab, seed, i));
  }
  return out;
}

ClozeExample DecodeExample(const EncodedExample& encoded, const Vocabulary& vocab) {
  std::map<TokenId, std::string> anonymous;
  for (const auto& [form, id] : encoded.oov_map) anonymous.emplace(id, form);
  auto decode = [&](TokenId id) {
    const auto it = anonymous.find(id);
    return it != anonymous.end() ? it->second : vocab.Token(id);
  };
  ClozeExample example;
  example.word_type = encoded.word_type;
  std::size_t pos = 0;
  for (std::size_t len : encoded.sentence_lengths) {
    Sentence s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(decode(encoded.context.at(pos++)));
    example.context.push_back(std::move(s));
  }
  for (TokenId id : encoded.question) example.question.push_back(decode(id));
  example.answer = decode(encoded.answer);
  for (TokenId id : encoded.candidates) example.candidates.push_back(decode(id));
  return example;
}

}  // namespace clozekit
