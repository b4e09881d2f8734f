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

#ifndef CLOZEKIT_EVALUATION_H_
#define CLOZEKIT_EVALUATION_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "clozekit/asreader.h"
#include "clozekit/clozegen.h"
#include "clozekit/vocab.h"

namespace clozekit {

// Predictions for every example, in input order. Examples are batched in
// order of context length to keep padding low.
std::vector<Prediction> PredictAll(const Model& model, const std::vector<EncodedExample>& examples,
                                   std::size_t batch_size = 64);

bool IsCorrect(const Prediction& prediction, const EncodedExample& example);

// Fraction of correct predictions; 0 for an empty set.
double Accuracy(const std::vector<Prediction>& predictions,
                const std::vector<EncodedExample>& examples);

// Picks the candidate occurring most often in the context, ties to the
// earlier candidate.
std::size_t MostFrequentCandidate(const ClozeExample& example);
double MostFrequentCandidateAccuracy(const std::vector<ClozeExample>& examples);

struct TypeAccuracy {
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(correct) / n; }
};

struct ComparisonRow {
  std::string label;
  double accuracy = 0.0;
};

struct EvalReport {
  std::string dataset;
  std::size_t n = 0;
  std::size_t correct = 0;
  std::map<WordType, TypeAccuracy> per_type;
  std::vector<ComparisonRow> comparisons;

  double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(correct) / n; }
  // Aligned plain-text table.
  std::string Format() const;
  // Same content, tab-separated with a header line.
  std::string FormatTsv() const;
};

// `correct[i]` says whether example i was answered correctly.
EvalReport MakeReport(const std::string& dataset, const std::vector<bool>& correct,
                      const std::vector<ClozeExample>& examples);

// One line per example: id, predicted token, correct flag (0/1).
struct PredictionRecord {
  std::size_t example_id = 0;
  std::string predicted;
  bool correct = false;
};

// Maps each prediction back to the surface form of the chosen candidate.
std::vector<PredictionRecord> MakeRecords(const std::vector<Prediction>& predictions,
                                          const std::vector<ClozeExample>& examples);

void WritePredictions(const std::filesystem::path& path,
                      const std::vector<PredictionRecord>& records);
// Throws ParseError on a malformed line.
std::vector<PredictionRecord> ReadPredictions(const std::filesystem::path& path);

// Fraction of examples answered correctly by a or b. Both lists must cover
// the same example ids; throws ValidationError otherwise.
double UnionAccuracy(const std::vector<PredictionRecord>& a,
                     const std::vector<PredictionRecord>& b);

struct ExportResult {
  std::vector<std::size_t> exported;  // example ids, in file order
  std::size_t available = 0;          // incorrect examples found
  bool short_of_request = false;
};

// Draws a seeded sample of `n` incorrectly answered examples and writes
// them without answers to `questions_path`, with "id<TAB>answer" lines to
// `key_path`. Fewer than n errors exports them all and flags the shortfall.
ExportResult ExportErrors(const std::vector<PredictionRecord>& records,
                          const std::vector<ClozeExample>& examples, std::size_t n,
                          std::uint64_t seed, const std::filesystem::path& questions_path,
                          const std::filesystem::path& key_path);

}  // namespace clozekit

#endif  // CLOZEKIT_EVALUATION_H_
