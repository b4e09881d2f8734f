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

#include "clozekit/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "clozekit/cbtio.h"
#include "clozekit/config.h"
#include "clozekit/error.h"
#include "clozekit/random.h"
#include "clozekit/resources.h"

namespace clozekit {
namespace {

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::vector<Prediction> PredictAll(const Model& model, const std::vector<EncodedExample>& examples,
                                   std::size_t batch_size) {
  if (batch_size == 0) throw ValidationError("batch size must be >= 1");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return examples[a].context.size() < examples[b].context.size();
  });
  std::vector<Prediction> out(examples.size());
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(order.size(), begin + batch_size);
    std::vector<const EncodedExample*> members;
    std::vector<std::size_t> indices;
    for (std::size_t i = begin; i < end; ++i) {
      members.push_back(&examples[order[i]]);
      indices.push_back(order[i]);
    }
    auto predictions = model.Predict(MakeBatch(members, indices));
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      out[indices[i]] = std::move(predictions[i]);
    }
  }
  return out;
}

bool IsCorrect(const Prediction& prediction, const EncodedExample& example) {
  return prediction.predicted_id() == example.answer;
}

double Accuracy(const std::vector<Prediction>& predictions,
                const std::vector<EncodedExample>& examples) {
  if (predictions.size() != examples.size()) {
    throw ValidationError("accuracy: " + std::to_string(predictions.size()) + " predictions for " +
                          std::to_string(examples.size()) + " examples");
  }
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) correct += IsCorrect(predictions[i], examples[i]);
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

std::size_t MostFrequentCandidate(const ClozeExample& example) {
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : example.context) {
    for (const auto& token : sentence) ++counts[token];
  }
  std::size_t best = 0;
  std::size_t best_count = 0;
  for (std::size_t c = 0; c < example.candidates.size(); ++c) {
    const auto it = counts.find(example.candidates[c]);
    const std::size_t count = it == counts.end() ? 0 : it->second;
    if (count > best_count) {
      best = c;
      best_count = count;
    }
  }
  return best;
}

double MostFrequentCandidateAccuracy(const std::vector<ClozeExample>& examples) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    correct += ex.candidates.at(MostFrequentCandidate(ex)) == ex.answer;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

std::string EvalReport::Format() const {
  std::string out = "dataset: " + dataset + "\n";
  out += Pad("subset", 14) + Pad("n", 10) + "accuracy\n";
  out += Pad("all", 14) + Pad(std::to_string(n), 10) + Percent(accuracy()) + "\n";
  for (const auto& [type, acc] : per_type) {
    out += Pad(std::string(WordTypeTag(type)), 14) + Pad(std::to_string(acc.n), 10) +
           Percent(acc.accuracy()) + "\n";
  }
  for (const auto& row : comparisons) {
    out += Pad(row.label, 14) + Pad("", 10) + Percent(row.accuracy) + "\n";
  }
  return out;
}

std::string EvalReport::FormatTsv() const {
  std::string out = "dataset\tsubset\tn\tcorrect\taccuracy\n";
  auto row = [&](const std::string& subset, std::size_t rn, std::size_t rc, double acc) {
    out += dataset + "\t" + subset + "\t" + std::to_string(rn) + "\t" + std::to_string(rc) + "\t" +
           FormatDouble(acc) + "\n";
  };
  row("all", n, correct, accuracy());
  for (const auto& [type, acc] : per_type) {
    row(std::string(WordTypeTag(type)), acc.n, acc.correct, acc.accuracy());
  }
  for (const auto& c : comparisons) row(c.label, 0, 0, c.accuracy);
  return out;
}

EvalReport MakeReport(const std::string& dataset, const std::vector<bool>& correct,
                      const std::vector<ClozeExample>& examples) {
  if (correct.size() != examples.size()) {
    throw ValidationError("report: " + std::to_string(correct.size()) + " outcomes for " +
                          std::to_string(examples.size()) + " examples");
  }
  EvalReport report;
  report.dataset = dataset;
  report.n = examples.size();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    TypeAccuracy& t = report.per_type[examples[i].word_type];
    ++t.n;
    if (correct[i]) {
      ++t.correct;
      ++report.correct;
    }
  }
  return report;
}

std::vector<PredictionRecord> MakeRecords(const std::vector<Prediction>& predictions,
                                          const std::vector<ClozeExample>& examples) {
  if (predictions.size() != examples.size()) {
    throw ValidationError("records: " + std::to_string(predictions.size()) +
                          " predictions for " + std::to_string(examples.size()) + " examples");
  }
  std::vector<PredictionRecord> records;
  records.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Prediction& p = predictions[i];
    // Candidate order is shared between the encoded and the raw example.
    const std::string token = examples[i].candidates.at(p.predicted);
    records.push_back({i, token, token == examples[i].answer});
  }
  return records;
}

void WritePredictions(const std::filesystem::path& path,
                      const std::vector<PredictionRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  for (const auto& r : records) {
    out << r.example_id << '\t' << r.predicted << '\t' << (r.correct ? 1 : 0) << '\n';
  }
  out.close();
  if (out.fail()) throw IoError("cannot write " + path.string());
}

std::vector<PredictionRecord> ReadPredictions(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  std::vector<PredictionRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw ParseError(path.string(), line_no, "expected id<TAB>token<TAB>correct");
    }
    PredictionRecord r;
    try {
      std::size_t used = 0;
      r.example_id = std::stoul(line.substr(0, t1), &used);
      if (used != t1) throw std::invalid_argument("id");
    } catch (const std::exception&) {
      throw ParseError(path.string(), line_no, "bad example id");
    }
    r.predicted = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string flag = line.substr(t2 + 1);
    if (flag != "0" && flag != "1") throw ParseError(path.string(), line_no, "correct flag must be 0 or 1");
    r.correct = flag == "1";
    records.push_back(std::move(r));
  }
  return records;
}

double UnionAccuracy(const std::vector<PredictionRecord>& a,
                     const std::vector<PredictionRecord>& b) {
  std::map<std::size_t, bool> first;
  for (const auto& r : a) {
    if (!first.emplace(r.example_id, r.correct).second) {
      throw ValidationError("duplicate example id " + std::to_string(r.example_id));
    }
  }
  if (b.size() != first.size()) {
    throw ValidationError("prediction files cover " + std::to_string(first.size()) + " and " +
                          std::to_string(b.size()) + " examples");
  }
  if (first.empty()) return 0.0;
  std::size_t correct = 0;
  std::set<std::size_t> seen;
  for (const auto& r : b) {
    const auto it = first.find(r.example_id);
    if (it == first.end() || !seen.insert(r.example_id).second) {
      throw ValidationError("example id " + std::to_string(r.example_id) +
                            " does not line up between prediction files");
    }
    correct += it->second || r.correct;
  }
  return static_cast<double>(correct) / static_cast<double>(first.size());
}

ExportResult ExportErrors(const std::vector<PredictionRecord>& records,
                          const std::vector<ClozeExample>& examples, std::size_t n,
                          std::uint64_t seed, const std::filesystem::path& questions_path,
                          const std::filesystem::path& key_path) {
  std::vector<std::size_t> wrong;
  for (const auto& r : records) {
    if (r.example_id >= examples.size()) {
      throw ValidationError("prediction for example " + std::to_string(r.example_id) +
                            " but the data has " + std::to_string(examples.size()));
    }
    if (!r.correct) wrong.push_back(r.example_id);
  }
  std::sort(wrong.begin(), wrong.end());
  wrong.erase(std::unique(wrong.begin(), wrong.end()), wrong.end());

  ExportResult result;
  result.available = wrong.size();
  result.short_of_request = wrong.size() < n;
  const std::size_t take = std::min(n, wrong.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(wrong[i], wrong[i + rng.UniformIndex(wrong.size() - i)]);
  }
  result.exported.assign(wrong.begin(), wrong.begin() + static_cast<std::ptrdiff_t>(take));

  std::ofstream questions(questions_path, std::ios::binary | std::ios::trunc);
  std::ofstream key(key_path, std::ios::binary | std::ios::trunc);
  if (!questions) throw IoError("cannot create " + questions_path.string());
  if (!key) throw IoError("cannot create " + key_path.string());
  for (std::size_t id : result.exported) {
    questions << FormatExampleWithoutAnswer(examples[id]);
    key << id << '\t' << examples[id].answer << '\n';
  }
  questions.close();
  key.close();
  if (questions.fail() || key.fail()) throw IoError("cannot write exported errors");
  return result;
}

}  // namespace clozekit
