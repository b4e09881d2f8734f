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

#ifndef CLOZEKIT_RANDOM_H_
#define CLOZEKIT_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace clozekit {

// Combines a seed with a value into a new well-mixed seed (splitmix64).
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t value);
// Same, hashing the bytes of `text` (FNV-1a) first.
std::uint64_t MixSeed(std::uint64_t seed, std::string_view text);

// Seeded random source with platform-independent output.
//
// The standard distributions are implementation-defined, so everything that
// feeds a dataset or a training trajectory goes through the helpers here,
// which only rely on the exactly specified mt19937_64 bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextBits() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  std::size_t UniformIndex(std::size_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01();

  // Uniform double in [lo, hi].
  double Uniform(double lo, double hi);

  // Standard normal via Box-Muller.
  double Gaussian();

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = UniformIndex(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace clozekit

#endif  // CLOZEKIT_RANDOM_H_
