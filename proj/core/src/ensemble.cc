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

#include "clozekit/ensemble.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "clozekit/config.h"
#include "clozekit/error.h"
#include "clozekit/resources.h"

namespace clozekit {

Prediction AveragePredictions(const std::vector<const Prediction*>& members) {
  if (members.empty()) throw ValidationError("cannot average zero predictions");
  const Prediction& first = *members.front();
  const std::size_t k = first.candidates.size();
  Prediction out;
  out.context = first.context;
  out.candidates = first.candidates;
  out.probabilities.assign(k, 0.0);
  out.raw.assign(k, 0.0);
  for (const Prediction* m : members) {
    if (m->candidates != first.candidates || m->probabilities.size() != k || m->raw.size() != k) {
      throw ValidationError("ensemble members predict over different candidate lists");
    }
    for (std::size_t c = 0; c < k; ++c) {
      out.probabilities[c] += m->probabilities[c];
      out.raw[c] += m->raw[c];
    }
  }
  const double n = static_cast<double>(members.size());
  for (std::size_t c = 0; c < k; ++c) {
    out.probabilities[c] /= n;
    out.raw[c] /= n;
  }
  out.predicted = 0;
  for (std::size_t c = 1; c < k; ++c) {
    if (out.probabilities[c] > out.probabilities[out.predicted]) out.predicted = c;
  }
  return out;
}

std::vector<Prediction> AverageAll(const std::vector<const std::vector<Prediction>*>& members) {
  if (members.empty()) throw ValidationError("cannot average zero models");
  const std::size_t n = members.front()->size();
  for (const auto* m : members) {
    if (m->size() != n) throw ValidationError("ensemble members cover different example counts");
  }
  std::vector<Prediction> out;
  out.reserve(n);
  std::vector<const Prediction*> row(members.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < members.size(); ++m) row[m] = &(*members[m])[i];
    out.push_back(AveragePredictions(row));
  }
  return out;
}

std::vector<std::size_t> AnswerIndices(const std::vector<EncodedExample>& examples) {
  std::vector<std::size_t> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& c = examples[i].candidates;
    const auto it = std::find(c.begin(), c.end(), examples[i].answer);
    if (it == c.end()) {
      throw ValidationError("example " + std::to_string(i) + ": answer is not a candidate");
    }
    out.push_back(static_cast<std::size_t>(it - c.begin()));
  }
  return out;
}

double IndexAccuracy(const std::vector<Prediction>& predictions,
                     const std::vector<std::size_t>& answers) {
  if (predictions.size() != answers.size()) {
    throw ValidationError(std::to_string(predictions.size()) + " predictions for " +
                          std::to_string(answers.size()) + " answers");
  }
  if (answers.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < answers.size(); ++i) correct += predictions[i].predicted == answers[i];
  return static_cast<double>(correct) / static_cast<double>(answers.size());
}

void EnsembleSpec::Validate() const {
  if (members.empty()) throw ValidationError("ensemble has no members");
  std::set<std::string> seen;
  for (const auto& m : members) {
    if (m.empty()) throw ValidationError("ensemble member path is empty");
    if (!seen.insert(m).second) throw ValidationError("ensemble member repeats: " + m);
  }
}

std::string EnsembleSpec::Serialize() const {
  Validate();
  std::string out = "validation_accuracy\t" + FormatDouble(validation_accuracy) + "\n";
  for (const auto& m : members) out += "member\t" + m + "\n";
  return out;
}

EnsembleSpec EnsembleSpec::Parse(const std::string& text, const std::string& source) {
  EnsembleSpec spec;
  bool have_accuracy = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, line_no, "expected key<TAB>value");
    const std::string key = line.substr(0, tab);
    const std::string value = line.substr(tab + 1);
    if (key == "member") {
      spec.members.push_back(value);
    } else if (key == "validation_accuracy") {
      if (have_accuracy) throw ParseError(source, line_no, "validation_accuracy repeats");
      const auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), spec.validation_accuracy);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ParseError(source, line_no, "bad accuracy '" + value + "'");
      }
      have_accuracy = true;
    } else {
      throw ParseError(source, line_no, "unknown key '" + key + "'");
    }
  }
  if (!have_accuracy) throw ParseError(source, line_no, "missing validation_accuracy");
  spec.Validate();
  return spec;
}

void EnsembleSpec::Save(const std::filesystem::path& path) const {
  const std::string text = Serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out << text;
  out.close();
  if (out.fail()) throw IoError("cannot write " + path.string());
}

EnsembleSpec EnsembleSpec::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), path.string());
}

SelectionResult GreedySelect(const std::vector<ModelPredictions>& candidates,
                             const std::vector<std::size_t>& answers) {
  if (candidates.empty()) throw ValidationError("greedy selection needs at least one model");
  std::set<std::string> names;
  for (const auto& c : candidates) {
    if (!names.insert(c.name).second) throw ValidationError("duplicate model name " + c.name);
  }

  std::vector<double> single(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    single[i] = IndexAccuracy(candidates[i].predictions, answers);
  }
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (single[a] != single[b]) return single[a] > single[b];
    return candidates[a].name < candidates[b].name;
  });

  SelectionResult result;
  std::vector<const std::vector<Prediction>*> members;
  double current = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t i = order[rank];
    SelectionTrial trial{candidates[i].name, single[i], single[i], false};
    if (rank == 0) {
      trial.kept = true;
    } else {
      auto tentative = members;
      tentative.push_back(&candidates[i].predictions);
      trial.ensemble_accuracy = IndexAccuracy(AverageAll(tentative), answers);
      trial.kept = trial.ensemble_accuracy > current;
    }
    if (trial.kept) {
      members.push_back(&candidates[i].predictions);
      result.spec.members.push_back(candidates[i].name);
      current = trial.ensemble_accuracy;
    }
    result.trials.push_back(std::move(trial));
  }
  result.spec.validation_accuracy = current;
  return result;
}

}  // namespace clozekit
