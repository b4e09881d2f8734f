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

#include "clozekit/asreader.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "clozekit/error.h"
#include "clozekit/optim.h"
#include "clozekit/random.h"

namespace clozekit {
namespace {

using Index = Eigen::Index;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Row of the word table for an id outside the anonymous block.
std::size_t WordRow(TokenId id) {
  return id < kFirstAnonymousId ? static_cast<std::size_t>(id)
                                : static_cast<std::size_t>(id) - kNumAnonymous;
}

// Like std::max but a NaN in either argument wins, so it reaches the loss.
double NanMax(double a, double b) { return std::isnan(a) || b > a ? b : a; }

double LogSumExpAt(const RowVector& scores, const std::vector<TokenId>& context, TokenId id) {
  bool found = false;
  double max = kNegInf;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (context[i] == id) {
      max = found ? NanMax(max, scores[static_cast<Index>(i)]) : scores[static_cast<Index>(i)];
      found = true;
    }
  }
  if (!found) return kNegInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (context[i] == id) sum += std::exp(scores[static_cast<Index>(i)] - max);
  }
  return max + std::log(sum);
}

}  // namespace

void ModelConfig::Validate() const {
  if (embedding_dim == 0 || hidden == 0 || layers == 0) {
    throw ValidationError("model dimensions must all be >= 1");
  }
  if (vocab_size < static_cast<std::size_t>(kFirstWordId)) {
    throw ValidationError("vocab_size " + std::to_string(vocab_size) +
                          " is smaller than the reserved block (" +
                          std::to_string(kFirstWordId) + ")");
  }
}

Batch MakeBatch(const std::vector<const EncodedExample*>& examples,
                const std::vector<std::size_t>& indices) {
  if (!indices.empty() && indices.size() != examples.size()) {
    throw ValidationError("batch: index list does not match example count");
  }
  Batch batch;
  for (const EncodedExample* ex : examples) {
    if (ex->context.empty()) throw ValidationError("batch: example with empty context");
    if (ex->question.empty()) throw ValidationError("batch: example with empty question");
    batch.context_width = std::max(batch.context_width, ex->context.size());
    batch.question_width = std::max(batch.question_width, ex->question.size());
  }
  const std::size_t n = examples.size();
  batch.context_ids.assign(n * batch.context_width, kPadId);
  batch.question_ids.assign(n * batch.question_width, kPadId);
  for (std::size_t b = 0; b < n; ++b) {
    const EncodedExample& ex = *examples[b];
    std::copy(ex.context.begin(), ex.context.end(),
              batch.context_ids.begin() + static_cast<std::ptrdiff_t>(b * batch.context_width));
    std::copy(ex.question.begin(), ex.question.end(),
              batch.question_ids.begin() + static_cast<std::ptrdiff_t>(b * batch.question_width));
    batch.context_lengths.push_back(ex.context.size());
    batch.question_lengths.push_back(ex.question.size());
    batch.answers.push_back(ex.answer);
    batch.candidates.push_back(ex.candidates);
    batch.example_indices.push_back(indices.empty() ? b : indices[b]);
  }
  return batch;
}

Prediction AggregateAttention(RowVector scores, const std::vector<TokenId>& candidates,
                              const std::vector<TokenId>& context) {
  if (static_cast<std::size_t>(scores.size()) != context.size()) {
    throw ShapeError("attention: " + std::to_string(scores.size()) + " scores for " +
                     std::to_string(context.size()) + " positions");
  }
  Prediction p;
  p.context = context;
  p.candidates = candidates;
  p.attention = Softmax(scores);
  p.scores = std::move(scores);
  p.raw.assign(candidates.size(), 0.0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (std::size_t i = 0; i < context.size(); ++i) {
      if (context[i] == candidates[c]) p.raw[c] += p.attention[static_cast<Index>(i)];
    }
  }
  const double total = std::accumulate(p.raw.begin(), p.raw.end(), 0.0);
  p.probabilities.resize(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    p.probabilities[c] = total > 0 ? p.raw[c] / total : 1.0 / static_cast<double>(candidates.size());
  }
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    if (p.probabilities[c] > p.probabilities[p.predicted]) p.predicted = c;
  }
  return p;
}

Prediction AttentionAndAnswer(const Matrix& contextual, const RowVector& question,
                              const std::vector<TokenId>& candidates,
                              const std::vector<TokenId>& context) {
  if (contextual.cols() != question.cols()) {
    throw ShapeError("attention: contextual width " + std::to_string(contextual.cols()) +
                     " differs from question width " + std::to_string(question.cols()));
  }
  RowVector scores = (contextual * question.transpose()).transpose();
  return AggregateAttention(std::move(scores), candidates, context);
}

double AnswerLoss(const Prediction& prediction, TokenId answer) {
  const double answer_mass = LogSumExpAt(prediction.scores, prediction.context, answer);
  if (answer_mass == kNegInf) {
    throw ValidationError("answer id " + std::to_string(answer) + " does not occur in the document");
  }
  return LogSumExp(prediction.scores) - answer_mass;
}

Model::Model(const ModelConfig& config) : config_(config) {
  config_.Validate();
  const std::size_t e = config_.embedding_dim;
  word_embeddings = Parameter("embeddings.words", Tensor({config_.vocab_size - kNumAnonymous, e}));
  anonymous_embeddings = Parameter("embeddings.anonymous", Tensor({kNumAnonymous, e}), false);
  document_encoder = BiGru("document", e, config_.hidden, config_.layers);
  question_encoder = BiGru("question", e, config_.hidden, config_.layers);
}

void Model::Initialize(std::uint64_t seed) {
  word_embeddings.value =
      UniformInit(word_embeddings.value.shape(), -0.1, 0.1, MixSeed(seed, "embeddings.words"));
  anonymous_embeddings.value = UniformInit(anonymous_embeddings.value.shape(), -0.1, 0.1,
                                           MixSeed(seed, "embeddings.anonymous"));
  document_encoder.Initialize(MixSeed(seed, "document"));
  question_encoder.Initialize(MixSeed(seed, "question"));
}

std::vector<Parameter*> Model::Parameters() {
  std::vector<Parameter*> out = {&word_embeddings, &anonymous_embeddings};
  for (Parameter* p : document_encoder.Parameters()) out.push_back(p);
  for (Parameter* p : question_encoder.Parameters()) out.push_back(p);
  return out;
}

std::vector<const Parameter*> Model::Parameters() const {
  std::vector<const Parameter*> out;
  for (Parameter* p : const_cast<Model*>(this)->Parameters()) out.push_back(p);
  return out;
}

void Model::ZeroGrad() {
  for (Parameter* p : Parameters()) p->ZeroGrad();
}

RowVector Model::Embedding(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
    throw ValidationError("token id " + std::to_string(id) + " outside vocabulary of " +
                          std::to_string(config_.vocab_size));
  }
  if (IsAnonymousId(id)) {
    return anonymous_embeddings.value.matrix().row(id - kFirstAnonymousId);
  }
  return word_embeddings.value.matrix().row(static_cast<Index>(WordRow(id)));
}

Matrix Model::Embed(const std::vector<TokenId>& ids, std::size_t width,
                    std::size_t batch) const {
  Matrix x(static_cast<Index>(width * batch), static_cast<Index>(config_.embedding_dim));
  for (std::size_t t = 0; t < width; ++t) {
    for (std::size_t b = 0; b < batch; ++b) {
      x.row(static_cast<Index>(t * batch + b)) = Embedding(ids[b * width + t]);
    }
  }
  return x;
}

void Model::ScatterEmbeddingGrad(const std::vector<TokenId>& ids, std::size_t width,
                                 std::size_t batch, const Matrix& d_inputs) {
  MatrixMap grad = word_embeddings.grad.matrix();
  for (std::size_t t = 0; t < width; ++t) {
    for (std::size_t b = 0; b < batch; ++b) {
      const TokenId id = ids[b * width + t];
      if (IsAnonymousId(id)) continue;
      grad.row(static_cast<Index>(WordRow(id))) += d_inputs.row(static_cast<Index>(t * batch + b));
    }
  }
}

struct Model::Pass {
  BiGruCache question_cache;
  BiGruCache query_init_cache;
  BiGruCache document_cache;
  BiGruResult document;
  Matrix g;       // [batch, 2 * hidden]
  Matrix scores;  // [batch, context_width], -inf at padding
};

void Model::RunForward(const Batch& batch, Pass& pass, bool keep_cache) const {
  const std::size_t n = batch.size();
  if (n == 0) throw ValidationError("empty batch");
  const auto h = static_cast<Index>(config_.hidden);
  const Matrix x_question = Embed(batch.question_ids, batch.question_width, n);
  const Matrix x_document = Embed(batch.context_ids, batch.context_width, n);

  BiGruResult q = question_encoder.Forward(x_question, batch.question_lengths, nullptr,
                                           keep_cache ? &pass.question_cache : nullptr);
  pass.g.resize(static_cast<Index>(n), 2 * h);
  pass.g << q.final_states.forward.back(), q.final_states.backward.back();

  BiGruResult query_pass;
  if (config_.query_init) {
    query_pass = document_encoder.Forward(x_question, batch.question_lengths, nullptr,
                                          keep_cache ? &pass.query_init_cache : nullptr);
  }
  pass.document = document_encoder.Forward(
      x_document, batch.context_lengths, config_.query_init ? &query_pass.final_states : nullptr,
      keep_cache ? &pass.document_cache : nullptr);

  pass.scores.setConstant(static_cast<Index>(n), static_cast<Index>(batch.context_width), kNegInf);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t t = 0; t < batch.context_lengths[b]; ++t) {
      pass.scores(static_cast<Index>(b), static_cast<Index>(t)) =
          pass.document.outputs.row(static_cast<Index>(t * n + b)).dot(pass.g.row(static_cast<Index>(b)));
    }
  }
}

double Model::Loss(const Batch& batch, bool backward) {
  Pass pass;
  RunForward(batch, pass, backward);
  const std::size_t n = batch.size();
  const auto width = static_cast<Index>(batch.context_width);
  Matrix d_scores = Matrix::Zero(static_cast<Index>(n), width);
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    const auto bi = static_cast<Index>(b);
    const auto len = static_cast<Index>(batch.context_lengths[b]);
    const RowVector scores = pass.scores.row(bi).head(len);
    const double all = LogSumExp(scores);
    bool found = false;
    double max_answer = kNegInf;
    for (Index t = 0; t < len; ++t) {
      if (batch.context_id(b, static_cast<std::size_t>(t)) == batch.answers[b]) {
        max_answer = found ? NanMax(max_answer, scores[t]) : scores[t];
        found = true;
      }
    }
    if (!found) {
      throw ValidationError("example " + std::to_string(batch.example_indices[b]) +
                            ": answer does not occur in the document");
    }
    double answer_sum = 0.0;
    for (Index t = 0; t < len; ++t) {
      if (batch.context_id(b, static_cast<std::size_t>(t)) == batch.answers[b]) {
        answer_sum += std::exp(scores[t] - max_answer);
      }
    }
    const double answer = max_answer + std::log(answer_sum);
    total += all - answer;
    if (backward) {
      // d/ds of (logsumexp(all) - logsumexp(answer positions)).
      for (Index t = 0; t < len; ++t) {
        double d = std::exp(scores[t] - all);
        if (batch.context_id(b, static_cast<std::size_t>(t)) == batch.answers[b]) {
          d -= std::exp(scores[t] - answer);
        }
        d_scores(bi, t) = d / static_cast<double>(n);
      }
    }
  }
  const double mean = total / static_cast<double>(n);
  if (!backward) return mean;

  const auto h = static_cast<Index>(config_.hidden);
  const Matrix& outputs = pass.document.outputs;
  Matrix d_outputs = Matrix::Zero(outputs.rows(), outputs.cols());
  Matrix d_g = Matrix::Zero(static_cast<Index>(n), 2 * h);
  for (std::size_t b = 0; b < n; ++b) {
    const auto bi = static_cast<Index>(b);
    for (std::size_t t = 0; t < batch.context_lengths[b]; ++t) {
      const auto row = static_cast<Index>(t * n + b);
      const double d = d_scores(bi, static_cast<Index>(t));
      d_outputs.row(row) = d * pass.g.row(bi);
      d_g.row(bi) += d * outputs.row(row);
    }
  }

  BiGruStates d_query_states;
  const Matrix d_document = document_encoder.Backward(
      pass.document_cache, d_outputs, nullptr, config_.query_init ? &d_query_states : nullptr);
  ScatterEmbeddingGrad(batch.context_ids, batch.context_width, n, d_document);

  BiGruStates d_final;
  d_final.forward.assign(config_.layers, Matrix());
  d_final.backward.assign(config_.layers, Matrix());
  d_final.forward.back() = d_g.leftCols(h);
  d_final.backward.back() = d_g.rightCols(h);
  Matrix d_question = question_encoder.Backward(pass.question_cache, Matrix(), &d_final, nullptr);
  if (config_.query_init) {
    d_question += document_encoder.Backward(pass.query_init_cache, Matrix(), &d_query_states, nullptr);
  }
  ScatterEmbeddingGrad(batch.question_ids, batch.question_width, n, d_question);
  return mean;
}

std::vector<Prediction> Model::Predict(const Batch& batch) const {
  Pass pass;
  RunForward(batch, pass, false);
  std::vector<Prediction> out;
  out.reserve(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto len = batch.context_lengths[b];
    const auto begin = batch.context_ids.begin() + static_cast<std::ptrdiff_t>(b * batch.context_width);
    std::vector<TokenId> context(begin, begin + static_cast<std::ptrdiff_t>(len));
    out.push_back(AggregateAttention(pass.scores.row(static_cast<Index>(b)).head(static_cast<Index>(len)),
                                     batch.candidates[b], context));
  }
  return out;
}

Matrix Model::EncodeDocument(const EncodedExample& example) const {
  if (example.context.empty()) throw ValidationError("cannot encode an empty document");
  const std::size_t length = example.context.size();
  const Matrix x = Embed(example.context, length, 1);
  const std::vector<std::size_t> lengths = {length};
  return document_encoder.Forward(x, lengths).outputs;
}

RowVector Model::EncodeQuestion(const EncodedExample& example) const {
  if (std::find(example.question.begin(), example.question.end(), kGapId) == example.question.end()) {
    throw ValidationError("question has no gap token");
  }
  const std::size_t length = example.question.size();
  const Matrix x = Embed(example.question, length, 1);
  const std::vector<std::size_t> lengths = {length};
  const BiGruResult q = question_encoder.Forward(x, lengths);
  RowVector g(2 * static_cast<Index>(config_.hidden));
  g << q.final_states.forward.back(), q.final_states.backward.back();
  return g;
}

Matrix Model::QueryInitiatedEncoding(const EncodedExample& example) const {
  if (!config_.query_init) throw ValidationError("model was not configured with query_init");
  if (example.context.empty()) throw ValidationError("cannot encode an empty document");
  const std::vector<std::size_t> q_lengths = {example.question.size()};
  const BiGruResult q =
      document_encoder.Forward(Embed(example.question, example.question.size(), 1), q_lengths);
  const std::vector<std::size_t> lengths = {example.context.size()};
  return document_encoder
      .Forward(Embed(example.context, example.context.size(), 1), lengths, &q.final_states)
      .outputs;
}

Prediction Model::Predict(const EncodedExample& example) const {
  const Matrix f = config_.query_init ? QueryInitiatedEncoding(example) : EncodeDocument(example);
  return AttentionAndAnswer(f, EncodeQuestion(example), example.candidates, example.context);
}

}  // namespace clozekit
