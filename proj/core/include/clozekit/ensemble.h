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

// Prediction averaging and greedy ensemble selection.

#ifndef CLOZEKIT_ENSEMBLE_H_
#define CLOZEKIT_ENSEMBLE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "clozekit/asreader.h"
#include "clozekit/vocab.h"

namespace clozekit {

// Mean of the members' candidate probabilities (and raw attention sums),
// answering with the argmax, ties to the earlier candidate. The result
// carries the first member's context and candidate ids. Throws
// ValidationError when the list is empty or candidate lists differ.
Prediction AveragePredictions(const std::vector<const Prediction*>& members);

// Example-wise average over several models' prediction lists.
std::vector<Prediction> AverageAll(const std::vector<const std::vector<Prediction>*>& members);

// Position of each example's answer within its candidate list.
std::vector<std::size_t> AnswerIndices(const std::vector<EncodedExample>& examples);

// Fraction of predictions whose chosen candidate index matches.
double IndexAccuracy(const std::vector<Prediction>& predictions,
                     const std::vector<std::size_t>& answers);

struct EnsembleSpec {
  std::vector<std::string> members;  // checkpoint paths, in selection order
  double validation_accuracy = 0.0;

  // Throws ValidationError when empty or a member repeats.
  void Validate() const;
  // "validation_accuracy<TAB>x" then one "member<TAB>path" line per member.
  std::string Serialize() const;
  static EnsembleSpec Parse(const std::string& text, const std::string& source);
  void Save(const std::filesystem::path& path) const;
  static EnsembleSpec Load(const std::filesystem::path& path);
};

struct ModelPredictions {
  std::string name;
  std::vector<Prediction> predictions;  // on the validation set
};

struct SelectionTrial {
  std::string name;
  double single_accuracy = 0.0;
  double ensemble_accuracy = 0.0;  // with this model tentatively added
  bool kept = false;
};

struct SelectionResult {
  EnsembleSpec spec;
  std::vector<SelectionTrial> trials;  // one per candidate, in trial order
};

// Starts from the best single model and tries the rest in descending
// single-model accuracy (ties by name), keeping each one only if the
// averaged ensemble's accuracy strictly improves. Throws ValidationError on
// an empty candidate list or duplicate names.
SelectionResult GreedySelect(const std::vector<ModelPredictions>& candidates,
                             const std::vector<std::size_t>& answers);

}  // namespace clozekit

#endif  // CLOZEKIT_ENSEMBLE_H_
