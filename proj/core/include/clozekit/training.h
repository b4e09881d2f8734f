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

#ifndef CLOZEKIT_TRAINING_H_
#define CLOZEKIT_TRAINING_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clozekit/asreader.h"
#include "clozekit/config.h"
#include "clozekit/optim.h"
#include "clozekit/vocab.h"

namespace clozekit {

struct TrainConfig {
  double learning_rate = 0.0005;
  std::size_t batch_size = 128;
  std::size_t prefetch_batches = 10;
  // Evaluate after this many training examples; 0 means at the end of each
  // epoch only.
  std::size_t eval_every = 0;
  std::size_t max_epochs = 10;
  // Stop after this many consecutive evaluations without improvement.
  std::size_t patience = 1;
  // Hard cap on optimizer steps; 0 means none.
  std::size_t max_steps = 0;
  std::uint64_t seed = 1;
  double clip_threshold = 10.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t eval_batch_size = 64;
  std::size_t vocab_cap = kDefaultVocabCap;

  // Throws ValidationError on an out-of-range value.
  void Validate() const;
  AdamConfig adam() const {
    return {learning_rate, adam_beta1, adam_beta2, adam_epsilon};
  }
};

// Reads training and model keys from one key=value file. Unknown keys are
// rejected. The model's vocab_size is left at 0 for the caller to fill.
TrainConfig ReadTrainConfig(const KeyValueConfig& config);
ModelConfig ReadModelSettings(const KeyValueConfig& config);
std::set<std::string> KnownConfigKeys();

// Example order for one epoch: a seeded permutation, cut into windows of
// prefetch * batch_size examples, each window stably sorted by context
// length and split into batches whose order within the window is then
// shuffled.
std::vector<std::vector<std::size_t>> PlanEpoch(const std::vector<EncodedExample>& examples,
                                                std::size_t batch_size, std::size_t prefetch,
                                                std::uint64_t epoch_seed);

std::uint64_t EpochSeed(std::uint64_t seed, std::size_t epoch);

// Lazily materializes the padded batches of one epoch.
class BatchStream {
 public:
  BatchStream(const std::vector<EncodedExample>& examples, const TrainConfig& config,
              std::uint64_t epoch_seed);

  bool Done() const { return next_ >= plan_.size(); }
  std::size_t size() const { return plan_.size(); }
  Batch Next();
  void Skip();

 private:
  const std::vector<EncodedExample>& examples_;
  std::vector<std::vector<std::size_t>> plan_;
  std::size_t next_ = 0;
};

class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Records one evaluation; returns true when it is a new best (strictly
  // greater than every earlier one).
  bool Record(double accuracy);
  bool ShouldStop() const { return bad_evaluations_ >= patience_ && !history_.empty(); }

  double best() const { return best_; }
  std::size_t best_index() const { return best_index_; }
  const std::vector<double>& history() const { return history_; }

 private:
  std::size_t patience_;
  std::vector<double> history_;
  double best_ = 0.0;
  std::size_t best_index_ = 0;
  std::size_t bad_evaluations_ = 0;
};

struct TrainLogEntry {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean batch loss since the previous entry
  double valid_accuracy = 0.0;
  double wall_seconds = 0.0;
};

// Tab-separated: step, train loss, validation accuracy, wall time.
std::string FormatLogEntry(const TrainLogEntry& entry);

// Counters and optimizer moments needed to continue a run.
struct TrainingState {
  std::size_t epochs_completed = 0;
  std::size_t steps = 0;
  // Batches already taken from the current, unfinished epoch.
  std::size_t batches_in_epoch = 0;
  std::vector<AdamState> adam;
  std::vector<double> history;  // validation accuracies so far
};

struct TrainOptions {
  std::function<void(const TrainLogEntry&, bool is_best)> on_evaluation;
  // Called with the current model before a NumericalError is thrown.
  std::function<void(const Model&)> on_divergence;
  // Continues a run: skips the batches already consumed and replays the
  // evaluation history into the early stopper, so is_best only fires on a
  // genuine improvement over the earlier evaluations.
  const TrainingState* resume = nullptr;
};

struct TrainResult {
  Model best_model;  // the starting model when a resumed run never improves
  bool improved = false;
  double best_accuracy = 0.0;
  std::size_t best_evaluation = 0;
  std::vector<TrainLogEntry> log;
  std::vector<double> step_losses;
  bool stopped_early = false;
  TrainingState final_state;
};

// Trains `model` in place (the final weights stay there) and returns the
// best validation snapshot seen during this call. Throws NumericalError on a non-finite loss.
TrainResult Train(Model& model, const std::vector<EncodedExample>& train,
                  const std::vector<EncodedExample>& valid, const TrainConfig& config,
                  const TrainOptions& options = {});

// Training state as named tensors for checkpoint extras ("adam.m.<param>",
// "adam.v.<param>", "train.counters", "train.history"), and back.
std::map<std::string, Tensor> ExportTrainingState(const Model& model, const TrainingState& state);
TrainingState ImportTrainingState(const Model& model, const std::map<std::string, Tensor>& extras);

}  // namespace clozekit

#endif  // CLOZEKIT_TRAINING_H_
