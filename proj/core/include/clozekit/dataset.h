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

// End-to-end dataset construction: blocklist, book split, tokenization,
// tagging and question generation.

#ifndef CLOZEKIT_DATASET_H_
#define CLOZEKIT_DATASET_H_

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "clozekit/clozegen.h"
#include "clozekit/corpus.h"
#include "clozekit/tagger.h"

namespace clozekit {

enum class Split { kTrain, kValid, kTest };
inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kValid, Split::kTest};
std::string_view SplitName(Split split);  // "train", "valid", "test"

struct DatasetOptions {
  WordType type = WordType::kNamedEntity;
  GenerationOptions generation;
  SplitFractions fractions;
  std::vector<std::string> blocklist;  // titles, normalized before matching
};

struct BookReport {
  std::string book_id;
  Split split = Split::kTrain;
  std::size_t sentences = 0;
  GenerationReport generation;
};

struct Dataset {
  SplitSpec split;
  std::array<std::vector<ClozeExample>, 3> examples;  // indexed by Split
  std::vector<BookReport> books;                      // in split, then id order
  std::vector<std::string> removed_titles;            // blocklisted books
  GenerationReport total;

  const std::vector<ClozeExample>& operator[](Split s) const {
    return examples[static_cast<std::size_t>(s)];
  }
};

// Blocklisted books are dropped before the split, so none of them reach any
// split. The split and every candidate draw derive from
// options.generation.seed.
Dataset BuildDataset(std::vector<RawBook> books, const Tagger& tagger,
                     const DatasetOptions& options);

// "clozekit_<NE|CN>_<split>.txt", a name the reader maps back to the type.
std::string SplitFileName(WordType type, Split split);

// Plain-text summary: split membership, per-book counts and skip reasons.
std::string FormatGenerationReport(const Dataset& dataset);

// Aligned statistics table, one row per named dataset.
std::string FormatStatsTable(const std::vector<std::pair<std::string, DatasetStats>>& rows);

// Writes the three split files, "generation_report.txt" and "stats.txt"
// into `directory`, creating it if needed.
void WriteDataset(const std::filesystem::path& directory, const Dataset& dataset, WordType type);

}  // namespace clozekit

#endif  // CLOZEKIT_DATASET_H_
