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

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "clozekit/error.h"
#include "clozekit/gradcheck.h"
#include "test_util.h"

namespace clozekit {
namespace {

using testing::RandomMatrix;
using testing::RandomRow;

constexpr TokenId W(int i) { return kFirstWordId + i; }

// Brute-force reference for the attention-sum step.
struct OracleResult {
  std::vector<double> attention;
  std::vector<double> probabilities;
  std::size_t predicted = 0;
};

OracleResult Oracle(const Matrix& f, const RowVector& g, const std::vector<TokenId>& candidates,
                    const std::vector<TokenId>& context) {
  OracleResult out;
  std::vector<double> scores;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    double s = 0;
    for (Eigen::Index j = 0; j < f.cols(); ++j) s += f(i, j) * g(j);
    scores.push_back(s);
  }
  double max = -std::numeric_limits<double>::infinity();
  for (double s : scores) max = std::max(max, s);
  double z = 0;
  for (double s : scores) z += std::exp(s - max);
  for (double s : scores) out.attention.push_back(std::exp(s - max) / z);
  std::vector<double> raw(candidates.size(), 0.0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (std::size_t i = 0; i < context.size(); ++i) {
      if (context[i] == candidates[c]) raw[c] += out.attention[i];
    }
  }
  double total = 0;
  for (double r : raw) total += r;
  for (double r : raw) out.probabilities.push_back(r / total);
  for (std::size_t c = 1; c < raw.size(); ++c) {
    if (raw[c] > raw[out.predicted]) out.predicted = c;
  }
  return out;
}

TEST(AttentionTest, MatchesBruteForceOracle) {
  const std::vector<TokenId> context = {W(0), W(1), W(2), W(1), W(3), W(4), W(1), W(0)};
  const std::vector<TokenId> candidates = {W(0), W(1), W(3), W(5)};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix f = RandomMatrix(8, 6, seed);
    const RowVector g = RandomRow(6, seed + 100);
    const Prediction p = AttentionAndAnswer(f, g, candidates, context);
    const OracleResult o = Oracle(f, g, candidates, context);
    double sum = 0;
    for (std::size_t i = 0; i < context.size(); ++i) {
      EXPECT_NEAR(p.attention(static_cast<Eigen::Index>(i)), o.attention[i], 1e-14);
      sum += p.attention(static_cast<Eigen::Index>(i));
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      EXPECT_NEAR(p.probabilities[c], o.probabilities[c], 1e-14);
    }
    EXPECT_EQ(p.raw[3], 0.0);
    EXPECT_EQ(p.predicted, o.predicted);
    EXPECT_EQ(p.candidates, candidates);
  }
}

TEST(AttentionTest, TiesGoToTheEarlierCandidate) {
  // Zero scores give uniform attention; W(1) and W(2) each hold two slots.
  const std::vector<TokenId> context = {W(1), W(2), W(2), W(1), W(0)};
  const Prediction p = AggregateAttention(RowVector::Zero(5), {W(0), W(2), W(1)}, context);
  EXPECT_EQ(p.predicted, 1u);
  EXPECT_DOUBLE_EQ(p.probabilities[1], 0.4);
  EXPECT_DOUBLE_EQ(p.probabilities[0], 0.2);
}

TEST(AttentionTest, UniformWhenNoCandidateOccurs) {
  const Prediction p = AggregateAttention(RowVector::Zero(3), {W(7), W(8)}, {W(0), W(1), W(2)});
  EXPECT_EQ(p.probabilities, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(p.predicted, 0u);
}

TEST(AttentionTest, AnswerLossIsMinusLogMass) {
  const std::vector<TokenId> context = {W(0), W(1), W(0)};
  RowVector scores(3);
  scores << 0.3, -1.0, 2.0;
  const Prediction p = AggregateAttention(scores, {W(0), W(1)}, context);
  const double z = std::exp(0.3) + std::exp(-1.0) + std::exp(2.0);
  EXPECT_NEAR(AnswerLoss(p, W(0)), -std::log((std::exp(0.3) + std::exp(2.0)) / z), 1e-14);
  EXPECT_NEAR(AnswerLoss(p, W(1)), -std::log(std::exp(-1.0) / z), 1e-14);
  EXPECT_THROW(AnswerLoss(p, W(5)), ValidationError);
}

TEST(AttentionTest, AnswerLossStaysFiniteForTinyMass) {
  RowVector scores(2);
  scores << 0.0, 900.0;
  const Prediction p = AggregateAttention(scores, {W(0), W(1)}, {W(0), W(1)});
  EXPECT_NEAR(AnswerLoss(p, W(0)), 900.0, 1e-9);
}

ModelConfig SmallConfig(bool query_init) {
  ModelConfig c;
  c.vocab_size = kFirstWordId + 8;
  c.embedding_dim = 4;
  c.hidden = 3;
  c.layers = 2;
  c.query_init = query_init;
  return c;
}

EncodedExample MakeEncoded(std::vector<TokenId> context, std::vector<TokenId> question,
                           TokenId answer, std::vector<TokenId> candidates) {
  EncodedExample e;
  e.context = std::move(context);
  e.sentence_lengths = {e.context.size()};
  e.question = std::move(question);
  e.answer = answer;
  e.candidates = std::move(candidates);
  return e;
}

std::vector<EncodedExample> SmallExamples() {
  return {
      MakeEncoded({W(0), W(1), W(2), W(3), W(1), W(4), kFirstAnonymousId + 3},
                  {W(5), kGapId, W(6)}, W(1), {W(0), W(1), W(4)}),
      MakeEncoded({W(2), W(3), W(2)}, {kGapId, W(7)}, W(2), {W(2), W(3)}),
      MakeEncoded({W(4), kFirstAnonymousId + 3, W(0), W(7), W(4)},
                  {W(6), W(5), W(6), kGapId}, kFirstAnonymousId + 3,
                  {W(4), kFirstAnonymousId + 3, W(0)}),
  };
}

Batch MakeSmallBatch(const std::vector<EncodedExample>& examples) {
  std::vector<const EncodedExample*> ptrs;
  for (const auto& e : examples) ptrs.push_back(&e);
  return MakeBatch(ptrs);
}

void Perturb(Model& model, std::uint64_t seed) {
  // Nonzero biases so every gradient path is active.
  for (Parameter* p : model.Parameters()) {
    Rng rng(seed++);
    for (auto& v : p->value.values()) v += 0.3 * rng.Gaussian();
  }
}

class ModelGradTest : public ::testing::TestWithParam<bool> {};

TEST_P(ModelGradTest, FullLossGradientMatchesFiniteDifferences) {
  Model model(SmallConfig(GetParam()));
  model.Initialize(3);
  Perturb(model, 40);
  const auto examples = SmallExamples();
  const Batch batch = MakeSmallBatch(examples);
  model.ZeroGrad();
  model.Loss(batch, /*backward=*/true);

  std::vector<Parameter*> params;
  std::vector<Tensor> grads;
  for (Parameter* p : model.Parameters()) {
    if (!p->trainable) {
      for (double g : p->grad.values()) EXPECT_EQ(g, 0.0) << p->name;
      continue;
    }
    params.push_back(p);
    grads.push_back(p->grad);
  }
  const auto result = FiniteDifferenceCheck([&]() { return model.Loss(batch); }, params, grads);
  EXPECT_LT(result.max_relative_error, 1e-4)
      << result.worst_parameter << "[" << result.worst_index << "] analytic " << result.analytic
      << " numeric " << result.numeric;
  EXPECT_GT(result.coordinates, 100u);
}

INSTANTIATE_TEST_SUITE_P(QueryInit, ModelGradTest, ::testing::Bool());

TEST(ModelTest, BatchedPredictionMatchesSingleExample) {
  for (bool query_init : {false, true}) {
    Model model(SmallConfig(query_init));
    model.Initialize(5);
    const auto examples = SmallExamples();
    const Batch batch = MakeSmallBatch(examples);
    const auto batched = model.Predict(batch);
    ASSERT_EQ(batched.size(), examples.size());
    for (std::size_t b = 0; b < examples.size(); ++b) {
      const Prediction single = model.Predict(examples[b]);
      EXPECT_EQ(batched[b].context, examples[b].context);
      ASSERT_EQ(batched[b].attention.size(), single.attention.size());
      EXPECT_LT((batched[b].attention - single.attention).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_EQ(batched[b].predicted, single.predicted);
    }
  }
}

TEST(ModelTest, LossIsMeanOfPerExampleAnswerLoss) {
  Model model(SmallConfig(false));
  model.Initialize(6);
  const auto examples = SmallExamples();
  const Batch batch = MakeSmallBatch(examples);
  double sum = 0;
  for (const auto& e : examples) sum += AnswerLoss(model.Predict(e), e.answer);
  EXPECT_NEAR(model.Loss(batch), sum / examples.size(), 1e-13);
}

TEST(ModelTest, QueryInitChangesTheDocumentEncoding) {
  Model model(SmallConfig(true));
  model.Initialize(7);
  const auto e = SmallExamples()[0];
  const Matrix plain = model.EncodeDocument(e);
  const Matrix init = model.QueryInitiatedEncoding(e);
  EXPECT_EQ(plain.rows(), init.rows());
  EXPECT_GT((plain - init).cwiseAbs().maxCoeff(), 1e-6);
  Model no_init(SmallConfig(false));
  no_init.Initialize(7);
  EXPECT_THROW(no_init.QueryInitiatedEncoding(e), ValidationError);
}

TEST(ModelTest, AnonymousEmbeddingsAreFrozenAndSeparate) {
  Model model(SmallConfig(false));
  model.Initialize(8);
  EXPECT_FALSE(model.anonymous_embeddings.trainable);
  EXPECT_TRUE(model.word_embeddings.trainable);
  EXPECT_EQ(model.anonymous_embeddings.value.shape(), (Shape{kNumAnonymous, 4}));
  EXPECT_EQ(model.word_embeddings.value.shape(), (Shape{2 + 8, 4}));
  const RowVector a = model.Embedding(kFirstAnonymousId + 3);
  EXPECT_EQ(a, model.anonymous_embeddings.value.matrix().row(3));
  EXPECT_EQ(model.Embedding(W(2)), model.word_embeddings.value.matrix().row(4));
  for (double v : model.word_embeddings.value.values()) {
    EXPECT_GE(v, -0.1);
    EXPECT_LE(v, 0.1);
  }
}

TEST(ModelTest, MissingAnswerAndBadBatchesThrow) {
  Model model(SmallConfig(false));
  model.Initialize(9);
  auto examples = SmallExamples();
  examples[1].answer = W(6);
  EXPECT_THROW(model.Loss(MakeSmallBatch(examples)), ValidationError);
  EncodedExample empty = SmallExamples()[0];
  empty.context.clear();
  EXPECT_THROW(MakeBatch({&empty}), ValidationError);
  ModelConfig bad = SmallConfig(false);
  bad.vocab_size = 5;
  EXPECT_THROW(bad.Validate(), ValidationError);
  bad = SmallConfig(false);
  bad.hidden = 0;
  EXPECT_THROW(Model{bad}, ValidationError);
}

TEST(BatchTest, PaddingLayout) {
  const auto examples = SmallExamples();
  const Batch batch = MakeSmallBatch(examples);
  EXPECT_EQ(batch.context_width, 7u);
  EXPECT_EQ(batch.question_width, 4u);
  EXPECT_EQ(batch.context_lengths, (std::vector<std::size_t>{7, 3, 5}));
  EXPECT_EQ(batch.context_id(1, 2), W(2));
  EXPECT_EQ(batch.context_id(1, 3), kPadId);
  EXPECT_FALSE(batch.live(1, 3));
  EXPECT_EQ(batch.question_id(1, 2), kPadId);
  EXPECT_EQ(batch.example_indices, (std::vector<std::size_t>{0, 1, 2}));
}

}  // namespace
}  // namespace clozekit
