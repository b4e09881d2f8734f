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

#include <gtest/gtest.h>

#include "clozekit/error.h"
#include "clozekit/random.h"
#include "test_util.h"

namespace clozekit {
namespace {

constexpr TokenId W(int i) { return kFirstWordId + i; }

Prediction Table(std::vector<double> probabilities) {
  Prediction p;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    p.candidates.push_back(W(static_cast<int>(i)));
  }
  p.context = p.candidates;
  p.raw = probabilities;
  p.probabilities = std::move(probabilities);
  p.predicted = static_cast<std::size_t>(
      std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin());
  return p;
}

TEST(AverageTest, ArithmeticMeanAndArgmax) {
  const Prediction a = Table({0.6, 0.4});
  const Prediction b = Table({0.2, 0.8});
  const Prediction avg = AveragePredictions({&a, &b});
  EXPECT_NEAR(avg.probabilities[0], 0.4, 1e-15);
  EXPECT_NEAR(avg.probabilities[1], 0.6, 1e-15);
  EXPECT_EQ(avg.predicted, 1u);
  EXPECT_EQ(avg.candidates, a.candidates);
}

TEST(AverageTest, SingleMemberIsIdentityAndTiesGoEarlier) {
  const Prediction a = Table({0.3, 0.5, 0.2});
  const Prediction same = AveragePredictions({&a});
  EXPECT_EQ(same.probabilities, a.probabilities);
  EXPECT_EQ(same.predicted, 1u);
  const Prediction x = Table({0.7, 0.3});
  const Prediction y = Table({0.3, 0.7});
  EXPECT_EQ(AveragePredictions({&x, &y}).predicted, 0u);
}

TEST(AverageTest, MeanIsAProbabilityVector) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Prediction> members;
    for (int m = 0; m < 4; ++m) {
      std::vector<double> p(10);
      double z = 0;
      for (auto& v : p) z += (v = rng.Uniform01());
      for (auto& v : p) v /= z;
      members.push_back(Table(p));
    }
    std::vector<const Prediction*> ptrs;
    for (const auto& m : members) ptrs.push_back(&m);
    const Prediction avg = AveragePredictions(ptrs);
    double sum = 0;
    for (double v : avg.probabilities) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(AverageTest, MismatchedCandidatesAndEmptyListThrow) {
  const Prediction a = Table({0.5, 0.5});
  Prediction b = Table({0.5, 0.5});
  b.candidates[1] = W(9);
  EXPECT_THROW(AveragePredictions({&a, &b}), ValidationError);
  EXPECT_THROW(AveragePredictions({}), ValidationError);
}

// Ten examples whose answer is always candidate 0. Model 1 is the best
// single model; model 2 is right exactly where model 1 is wrong and does so
// confidently; model 3 is confidently wrong where the others need it.
std::vector<ModelPredictions> ThreeModelFixture() {
  std::vector<ModelPredictions> models(3);
  models[0].name = "model1";
  models[1].name = "model2";
  models[2].name = "model3";
  for (int i = 0; i < 10; ++i) {
    models[0].predictions.push_back(Table(i <= 5 ? std::vector{0.6, 0.4} : std::vector{0.45, 0.55}));
    models[1].predictions.push_back(Table(i >= 5 ? std::vector{0.8, 0.2} : std::vector{0.45, 0.55}));
    models[2].predictions.push_back(Table(i <= 3 ? std::vector{0.55, 0.45} : std::vector{0.0, 1.0}));
  }
  return models;
}

TEST(GreedySelectTest, ThreeModelFixtureSelectsOneAndTwo) {
  const std::vector<std::size_t> answers(10, 0);
  const SelectionResult r = GreedySelect(ThreeModelFixture(), answers);
  EXPECT_EQ(r.spec.members, (std::vector<std::string>{"model1", "model2"}));
  EXPECT_DOUBLE_EQ(r.spec.validation_accuracy, 1.0);
  ASSERT_EQ(r.trials.size(), 3u);
  EXPECT_EQ(r.trials[0].name, "model1");
  EXPECT_DOUBLE_EQ(r.trials[0].single_accuracy, 0.6);
  EXPECT_TRUE(r.trials[0].kept);
  EXPECT_EQ(r.trials[1].name, "model2");
  EXPECT_TRUE(r.trials[1].kept);
  EXPECT_EQ(r.trials[2].name, "model3");
  EXPECT_FALSE(r.trials[2].kept);
  EXPECT_LT(r.trials[2].ensemble_accuracy, 1.0);
}

TEST(GreedySelectTest, OrderIgnoresInputOrderAndBreaksTiesByName) {
  auto models = ThreeModelFixture();
  std::reverse(models.begin(), models.end());
  const std::vector<std::size_t> answers(10, 0);
  EXPECT_EQ(GreedySelect(models, answers).spec.members,
            (std::vector<std::string>{"model1", "model2"}));
  // Two identical models: the alphabetically first is the starting point.
  std::vector<ModelPredictions> twins = {ThreeModelFixture()[0], ThreeModelFixture()[0]};
  twins[0].name = "zeta";
  twins[1].name = "alpha";
  const SelectionResult r = GreedySelect(twins, answers);
  EXPECT_EQ(r.spec.members, (std::vector<std::string>{"alpha"}));
}

TEST(GreedySelectTest, SingleCandidateAndErrors) {
  const std::vector<std::size_t> answers(10, 0);
  const SelectionResult r = GreedySelect({ThreeModelFixture()[2]}, answers);
  EXPECT_EQ(r.spec.members.size(), 1u);
  EXPECT_DOUBLE_EQ(r.spec.validation_accuracy, 0.4);
  EXPECT_THROW(GreedySelect({}, answers), ValidationError);
  auto dup = ThreeModelFixture();
  dup[1].name = "model1";
  EXPECT_THROW(GreedySelect(dup, answers), ValidationError);
}

// Random prediction tables: the ensemble never falls below the best single
// model and every candidate is tried exactly once.
TEST(GreedySelectTest, NeverWorseThanBestSingleModel) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n_models = 1 + rng.UniformIndex(6);
    const std::size_t n_examples = 5 + rng.UniformIndex(40);
    std::vector<std::size_t> answers(n_examples);
    for (auto& a : answers) a = rng.UniformIndex(4);
    std::vector<ModelPredictions> models(n_models);
    double best_single = 0;
    for (std::size_t m = 0; m < n_models; ++m) {
      models[m].name = "m" + std::to_string(m);
      for (std::size_t e = 0; e < n_examples; ++e) {
        std::vector<double> p(4);
        double z = 0;
        for (auto& v : p) z += (v = rng.Uniform01());
        for (auto& v : p) v /= z;
        models[m].predictions.push_back(Table(p));
      }
      best_single = std::max(best_single, IndexAccuracy(models[m].predictions, answers));
    }
    const SelectionResult r = GreedySelect(models, answers);
    EXPECT_GE(r.spec.validation_accuracy, best_single);
    EXPECT_EQ(r.trials.size(), n_models);
    std::vector<const std::vector<Prediction>*> members;
    for (const auto& name : r.spec.members) {
      for (const auto& m : models) {
        if (m.name == name) members.push_back(&m.predictions);
      }
    }
    EXPECT_DOUBLE_EQ(IndexAccuracy(AverageAll(members), answers), r.spec.validation_accuracy);
  }
}

TEST(EnsembleSpecTest, SerializeParseSaveLoad) {
  EnsembleSpec spec;
  spec.members = {"a.ckpt", "dir/b.ckpt"};
  spec.validation_accuracy = 0.625;
  EXPECT_EQ(spec.Serialize(), "validation_accuracy\t0.625\nmember\ta.ckpt\nmember\tdir/b.ckpt\n");
  const EnsembleSpec parsed = EnsembleSpec::Parse(spec.Serialize(), "x");
  EXPECT_EQ(parsed.members, spec.members);
  EXPECT_EQ(parsed.validation_accuracy, spec.validation_accuracy);
  testing::TempDir dir;
  spec.Save(dir / "e.txt");
  EXPECT_EQ(EnsembleSpec::Load(dir / "e.txt").members, spec.members);
  EXPECT_THROW(EnsembleSpec::Parse("member\ta\nmember\ta\n", "x"), ValidationError);
  EXPECT_THROW(EnsembleSpec::Parse("validation_accuracy\t0.5\n", "x"), ValidationError);
  EXPECT_THROW(EnsembleSpec::Parse("bogus line\n", "x"), ParseError);
}

}  // namespace
}  // namespace clozekit
