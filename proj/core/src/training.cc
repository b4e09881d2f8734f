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

#include "clozekit/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "clozekit/error.h"
#include "clozekit/evaluation.h"
#include "clozekit/random.h"

namespace clozekit {
namespace {

constexpr const char* kCountersName = "train.counters";
constexpr const char* kHistoryName = "train.history";

}  // namespace

void TrainConfig::Validate() const {
  if (!(learning_rate > 0)) throw ValidationError("learning_rate must be positive");
  if (batch_size == 0) throw ValidationError("batch_size must be >= 1");
  if (prefetch_batches == 0) throw ValidationError("prefetch_batches must be >= 1");
  if (max_epochs == 0) throw ValidationError("max_epochs must be >= 1");
  if (patience == 0) throw ValidationError("patience must be >= 1");
  if (!(clip_threshold > 0)) throw ValidationError("clip_threshold must be positive");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1) || !(adam_beta2 >= 0 && adam_beta2 < 1)) {
    throw ValidationError("adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0)) throw ValidationError("adam_epsilon must be positive");
  if (eval_batch_size == 0) throw ValidationError("eval_batch_size must be >= 1");
  if (vocab_cap == 0) throw ValidationError("vocab_cap must be >= 1");
}

std::set<std::string> KnownConfigKeys() {
  return {"learning_rate", "batch_size",  "prefetch_batches", "eval_every",   "max_epochs",
          "patience",      "max_steps",   "seed",             "clip_threshold", "adam_beta1",
          "adam_beta2",    "adam_epsilon", "eval_batch_size", "vocab_cap",    "embedding_dim",
          "hidden",        "layers",      "query_init"};
}

TrainConfig ReadTrainConfig(const KeyValueConfig& config) {
  config.RequireKnown(KnownConfigKeys());
  TrainConfig c;
  c.learning_rate = config.GetDouble("learning_rate", c.learning_rate);
  c.batch_size = config.GetSize("batch_size", c.batch_size);
  c.prefetch_batches = config.GetSize("prefetch_batches", c.prefetch_batches);
  c.eval_every = config.GetSize("eval_every", c.eval_every);
  c.max_epochs = config.GetSize("max_epochs", c.max_epochs);
  c.patience = config.GetSize("patience", c.patience);
  c.max_steps = config.GetSize("max_steps", c.max_steps);
  c.seed = config.GetUint64("seed", c.seed);
  c.clip_threshold = config.GetDouble("clip_threshold", c.clip_threshold);
  c.adam_beta1 = config.GetDouble("adam_beta1", c.adam_beta1);
  c.adam_beta2 = config.GetDouble("adam_beta2", c.adam_beta2);
  c.adam_epsilon = config.GetDouble("adam_epsilon", c.adam_epsilon);
  c.eval_batch_size = config.GetSize("eval_batch_size", c.eval_batch_size);
  c.vocab_cap = config.GetSize("vocab_cap", c.vocab_cap);
  c.Validate();
  return c;
}

ModelConfig ReadModelSettings(const KeyValueConfig& config) {
  config.RequireKnown(KnownConfigKeys());
  ModelConfig m;
  m.embedding_dim = config.GetSize("embedding_dim", m.embedding_dim);
  m.hidden = config.GetSize("hidden", m.hidden);
  m.layers = config.GetSize("layers", m.layers);
  m.query_init = config.GetBool("query_init", m.query_init);
  if (m.embedding_dim == 0 || m.hidden == 0 || m.layers == 0) {
    throw ValidationError("embedding_dim, hidden and layers must be >= 1");
  }
  return m;
}

std::uint64_t EpochSeed(std::uint64_t seed, std::size_t epoch) {
  return MixSeed(MixSeed(seed, "epoch"), epoch);
}

std::vector<std::vector<std::size_t>> PlanEpoch(const std::vector<EncodedExample>& examples,
                                                std::size_t batch_size, std::size_t prefetch,
                                                std::uint64_t epoch_seed) {
  if (batch_size == 0 || prefetch == 0) {
    throw ValidationError("batch size and prefetch must be >= 1");
  }
  Rng rng(epoch_seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<std::size_t>(order));

  std::vector<std::vector<std::size_t>> plan;
  const std::size_t window = batch_size * prefetch;
  for (std::size_t begin = 0; begin < order.size(); begin += window) {
    const auto first = order.begin() + static_cast<std::ptrdiff_t>(begin);
    const auto last = order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), begin + window));
    std::stable_sort(first, last, [&](std::size_t a, std::size_t b) {
      return examples[a].context.size() < examples[b].context.size();
    });
    std::vector<std::vector<std::size_t>> batches;
    for (auto it = first; it != last;) {
      const auto end = it + std::min<std::ptrdiff_t>(last - it, static_cast<std::ptrdiff_t>(batch_size));
      batches.emplace_back(it, end);
      it = end;
    }
    rng.Shuffle(std::span<std::vector<std::size_t>>(batches));
    for (auto& b : batches) plan.push_back(std::move(b));
  }
  return plan;
}

BatchStream::BatchStream(const std::vector<EncodedExample>& examples, const TrainConfig& config,
                         std::uint64_t epoch_seed)
    : examples_(examples),
      plan_(PlanEpoch(examples, config.batch_size, config.prefetch_batches, epoch_seed)) {}

Batch BatchStream::Next() {
  if (Done()) throw ValidationError("batch stream exhausted");
  const auto& indices = plan_[next_++];
  std::vector<const EncodedExample*> members;
  members.reserve(indices.size());
  for (std::size_t i : indices) members.push_back(&examples_[i]);
  return MakeBatch(members, indices);
}

void BatchStream::Skip() {
  if (Done()) throw ValidationError("batch stream exhausted");
  ++next_;
}

bool EarlyStopper::Record(double accuracy) {
  history_.push_back(accuracy);
  if (history_.size() == 1 || accuracy > best_) {
    best_ = accuracy;
    best_index_ = history_.size() - 1;
    bad_evaluations_ = 0;
    return true;
  }
  ++bad_evaluations_;
  return false;
}

std::string FormatLogEntry(const TrainLogEntry& entry) {
  char wall[32];
  std::snprintf(wall, sizeof(wall), "%.3f", entry.wall_seconds);
  return std::to_string(entry.step) + "\t" + FormatDouble(entry.train_loss) + "\t" +
         FormatDouble(entry.valid_accuracy) + "\t" + wall;
}

TrainResult Train(Model& model, const std::vector<EncodedExample>& train,
                  const std::vector<EncodedExample>& valid, const TrainConfig& config,
                  const TrainOptions& options) {
  config.Validate();
  if (train.empty()) throw ValidationError("training set is empty");
  if (valid.empty()) throw ValidationError("validation set is empty");

  const auto params = model.Parameters();
  Adam adam(params, config.adam());
  TrainingState state;
  if (options.resume) {
    state = *options.resume;
    if (!state.adam.empty()) {
      if (state.adam.size() != params.size()) {
        throw ValidationError("resume state has " + std::to_string(state.adam.size()) +
                              " optimizer slots for " + std::to_string(params.size()) +
                              " parameters");
      }
      adam.states() = state.adam;
    }
  }

  const auto start = std::chrono::steady_clock::now();
  EarlyStopper stopper(config.patience);
  for (double acc : state.history) stopper.Record(acc);
  TrainResult result;
  result.best_model = model;
  result.best_accuracy = stopper.best();
  result.best_evaluation = stopper.best_index();
  if (stopper.ShouldStop()) {
    result.stopped_early = true;
    state.adam = adam.states();
    result.final_state = std::move(state);
    return result;
  }
  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  std::size_t since_eval = 0;
  std::size_t evaluations = state.history.size();

  auto evaluate = [&](std::size_t epoch) {
    const double acc = Accuracy(PredictAll(model, valid, config.eval_batch_size), valid);
    TrainLogEntry entry;
    entry.step = state.steps;
    entry.epoch = epoch;
    entry.train_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    entry.valid_accuracy = acc;
    entry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool best = stopper.Record(acc);
    if (best) {
      result.best_model = model;
      result.improved = true;
      result.best_accuracy = acc;
      result.best_evaluation = evaluations;
    }
    ++evaluations;
    state.history.push_back(acc);
    result.log.push_back(entry);
    if (options.on_evaluation) options.on_evaluation(entry, best);
    loss_sum = 0.0;
    loss_count = 0;
    since_eval = 0;
    return stopper.ShouldStop();
  };

  bool finished = false;
  for (std::size_t epoch = state.epochs_completed; epoch < config.max_epochs && !finished; ++epoch) {
    BatchStream stream(train, config, EpochSeed(config.seed, epoch));
    for (std::size_t i = 0; i < state.batches_in_epoch && !stream.Done(); ++i) stream.Skip();
    while (!stream.Done()) {
      const Batch batch = stream.Next();
      ++state.batches_in_epoch;
      model.ZeroGrad();
      const double loss = model.Loss(batch, true);
      const double norm = std::isfinite(loss) ? ClipGradients(params, config.clip_threshold) : loss;
      if (!std::isfinite(loss) || !std::isfinite(norm)) {
        if (options.on_divergence) options.on_divergence(model);
        throw NumericalError("non-finite " + std::string(std::isfinite(loss) ? "gradient" : "loss") +
                             " at step " + std::to_string(state.steps + 1));
      }
      adam.Step();
      ++state.steps;
      result.step_losses.push_back(loss);
      loss_sum += loss;
      ++loss_count;
      since_eval += batch.size();
      if (config.eval_every > 0 && since_eval >= config.eval_every && evaluate(epoch)) {
        result.stopped_early = true;
        finished = true;
        break;
      }
      if (config.max_steps > 0 && state.steps >= config.max_steps) {
        finished = true;
        break;
      }
    }
    if (!finished || stream.Done()) {
      ++state.epochs_completed;
      state.batches_in_epoch = 0;
    }
    if (!finished && config.eval_every == 0 && evaluate(epoch)) {
      result.stopped_early = true;
      finished = true;
    }
  }
  if (result.log.empty() || loss_count > 0) evaluate(state.epochs_completed);

  state.adam = adam.states();
  result.final_state = std::move(state);
  return result;
}

std::map<std::string, Tensor> ExportTrainingState(const Model& model, const TrainingState& state) {
  std::map<std::string, Tensor> out;
  const auto params = model.Parameters();
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < params.size() && i < state.adam.size(); ++i) {
    const AdamState& s = state.adam[i];
    if (s.m.shape() != params[i]->value.shape()) continue;
    out.emplace("adam.m." + params[i]->name, s.m);
    out.emplace("adam.v." + params[i]->name, s.v);
    t = std::max(t, s.t);
  }
  out.emplace(kCountersName,
              Tensor({4}, {static_cast<double>(state.epochs_completed),
                           static_cast<double>(state.steps), static_cast<double>(t),
                           static_cast<double>(state.batches_in_epoch)}));
  out.emplace(kHistoryName, Tensor({state.history.size()}, state.history));
  return out;
}

TrainingState ImportTrainingState(const Model& model, const std::map<std::string, Tensor>& extras) {
  TrainingState state;
  const auto counters = extras.find(kCountersName);
  if (counters == extras.end() || counters->second.size() != 4) {
    throw ValidationError("checkpoint carries no training state");
  }
  state.epochs_completed = static_cast<std::size_t>(counters->second[0]);
  state.steps = static_cast<std::size_t>(counters->second[1]);
  const auto t = static_cast<std::uint64_t>(counters->second[2]);
  state.batches_in_epoch = static_cast<std::size_t>(counters->second[3]);
  if (const auto h = extras.find(kHistoryName); h != extras.end()) state.history = h->second.values();
  const auto params = model.Parameters();
  state.adam.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto m = extras.find("adam.m." + params[i]->name);
    const auto v = extras.find("adam.v." + params[i]->name);
    if (m == extras.end() || v == extras.end()) continue;
    if (m->second.shape() != params[i]->value.shape() || v->second.shape() != params[i]->value.shape()) {
      throw ShapeError("optimizer state for '" + params[i]->name + "' has the wrong shape");
    }
    state.adam[i] = {m->second, v->second, t};
  }
  return state;
}

}  // namespace clozekit
