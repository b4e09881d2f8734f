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

// Toy pointing tasks whose answer is fully determined by the document,
// for checking that a reader can learn at all.

#ifndef CLOZEKIT_SYNTHETIC_H_
#define CLOZEKIT_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "clozekit/clozegen.h"

namespace clozekit {

enum class PointingTask {
  // Ten candidate words appear once each among filler tokens, except the
  // answer, which appears twice.
  kRepeatedToken,
  // The document lists ten "key value" pairs; the question names a key and
  // the answer is its value.
  kKeyValue,
};

struct SyntheticOptions {
  PointingTask task = PointingTask::kRepeatedToken;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  std::size_t word_pool = 60;    // distinct candidate/value words
  std::size_t key_pool = 30;     // distinct keys (key-value task)
  std::size_t filler_pool = 30;  // distinct filler tokens
  std::size_t max_fillers = 12;  // filler tokens per document, drawn in [0, max]
};

// Examples satisfy CheckExample with no window requirement.
std::vector<ClozeExample> MakePointingExamples(const SyntheticOptions& options);

}  // namespace clozekit

#endif  // CLOZEKIT_SYNTHETIC_H_
