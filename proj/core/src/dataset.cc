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

#include "clozekit/dataset.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "clozekit/cbtio.h"
#include "clozekit/error.h"

namespace clozekit {
namespace {

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out << text;
  out.close();
  if (out.fail()) throw IoError("cannot write " + path.string());
}

}  // namespace

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Dataset BuildDataset(std::vector<RawBook> books, const Tagger& tagger,
                     const DatasetOptions& options) {
  if (options.type == WordType::kOther) {
    throw ValidationError("answer type must be NE or CN");
  }
  Dataset dataset;
  DedupResult dedup = DedupEditions(std::move(books), options.blocklist);
  for (const auto& b : dedup.removed) dataset.removed_titles.push_back(b.title);
  if (dedup.kept.empty()) throw EmptyCorpusError("no books left after applying the blocklist");

  dataset.split = SplitBooks(dedup.kept, options.fractions, options.generation.seed);
  for (const auto& t : options.blocklist) dataset.split.blocklist.insert(NormalizeTitle(t));

  std::map<std::string, const RawBook*> by_id;
  for (const auto& b : dedup.kept) by_id[b.book_id] = &b;
  const std::array<const std::vector<std::string>*, 3> members = {
      &dataset.split.train_books, &dataset.split.valid_books, &dataset.split.test_books};

  for (Split s : kAllSplits) {
    std::vector<std::string> ids = *members[static_cast<std::size_t>(s)];
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) {
      const TokenizedBook book = TokenizeBook(*by_id.at(id));
      const BookLabels labels = tagger.Tag(book);
      GenerationResult result = GenerateFromBook(book, labels, options.type, options.generation);
      auto& out = dataset.examples[static_cast<std::size_t>(s)];
      for (auto& ex : result.examples) out.push_back(std::move(ex));
      dataset.books.push_back({id, s, book.sentences.size(), result.report});
      dataset.total += result.report;
    }
  }
  return dataset;
}

std::string SplitFileName(WordType type, Split split) {
  return "clozekit_" + std::string(WordTypeTag(type)) + "_" + std::string(SplitName(split)) +
         ".txt";
}

std::string FormatGenerationReport(const Dataset& dataset) {
  std::string out;
  out += "books: train " + std::to_string(dataset.split.train_books.size()) + ", valid " +
         std::to_string(dataset.split.valid_books.size()) + ", test " +
         std::to_string(dataset.split.test_books.size()) + "\n";
  out += "blocklisted books removed: " + std::to_string(dataset.removed_titles.size()) + "\n";
  for (const auto& t : dataset.removed_titles) out += "  removed: " + t + "\n";
  out += "\n" + Pad("book", 28) + Pad("split", 7) + Pad("sentences", 11) + Pad("examined", 10) +
         Pad("emitted", 9) + Pad("no_repeat", 11) + "small_pool\n";
  auto row = [&](const std::string& name, const std::string& split, const std::string& sentences,
                 const GenerationReport& r) {
    out += Pad(name, 28) + Pad(split, 7) + Pad(sentences, 11) + Pad(std::to_string(r.examined), 10) +
           Pad(std::to_string(r.emitted), 9) + Pad(std::to_string(r.skipped_no_repeat), 11) +
           std::to_string(r.skipped_small_pool) + "\n";
  };
  for (const auto& b : dataset.books) {
    row(b.book_id, std::string(SplitName(b.split)), std::to_string(b.sentences), b.generation);
  }
  row("total", "", "", dataset.total);
  return out;
}

std::string FormatStatsTable(const std::vector<std::pair<std::string, DatasetStats>>& rows) {
  std::string out = Pad("dataset", 28) + Pad("queries", 10) + Pad("max_options", 13) +
                    Pad("avg_options", 13) + Pad("avg_tokens", 12) + "vocab_size\n";
  for (const auto& [name, s] : rows) {
    out += Pad(name, 28) + Pad(std::to_string(s.n_queries), 10) +
           Pad(std::to_string(s.max_options), 13) + Pad(Fixed(s.avg_options, 2), 13) +
           Pad(Fixed(s.avg_tokens, 1), 12) + std::to_string(s.vocab_size) + "\n";
  }
  return out;
}

void WriteDataset(const std::filesystem::path& directory, const Dataset& dataset, WordType type) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
  std::vector<std::pair<std::string, DatasetStats>> stats;
  for (Split s : kAllSplits) {
    const std::string name = SplitFileName(type, s);
    WriteExamples(directory / name, dataset[s]);
    stats.emplace_back(name, ComputeStats(dataset[s]));
  }
  WriteText(directory / "generation_report.txt", FormatGenerationReport(dataset));
  WriteText(directory / "stats.txt", FormatStatsTable(stats));
}

}  // namespace clozekit
