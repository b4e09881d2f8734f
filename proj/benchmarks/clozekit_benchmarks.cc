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


#include <benchmark/benchmark.h>

#include <vector>

#include "clozekit/asreader.h"
#include "clozekit/corpus.h"
#include "clozekit/gru.h"
#include "clozekit/random.h"
#include "clozekit/synthetic.h"
#include "clozekit/vocab.h"

namespace clozekit {
namespace {

Matrix Gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Gaussian();
  return m;
}

// Args: steps, batch, hidden.
void BM_BiGruForward(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const auto batch = static_cast<std::size_t>(state.range(1));
  const auto hidden = static_cast<std::size_t>(state.range(2));
  BiGru gru("enc", 64, hidden, 1);
  gru.Initialize(1);
  const Matrix x = Gaussian(static_cast<Eigen::Index>(steps * batch), 64, 2);
  const std::vector<std::size_t> lengths(batch, steps);
  for (auto _ : state) benchmark::DoNotOptimize(gru.Forward(x, lengths));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * steps * batch));
}
BENCHMARK(BM_BiGruForward)->Args({100, 1, 64})->Args({100, 32, 64})->Args({400, 32, 128});

void BM_BiGruForwardBackward(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const auto batch = static_cast<std::size_t>(state.range(1));
  const auto hidden = static_cast<std::size_t>(state.range(2));
  BiGru gru("enc", 64, hidden, 1);
  gru.Initialize(1);
  const Matrix x = Gaussian(static_cast<Eigen::Index>(steps * batch), 64, 2);
  const std::vector<std::size_t> lengths(batch, steps);
  const Matrix d_out = Gaussian(static_cast<Eigen::Index>(steps * batch),
                                static_cast<Eigen::Index>(2 * hidden), 3);
  for (auto _ : state) {
    BiGruCache cache;
    gru.Forward(x, lengths, nullptr, &cache);
    benchmark::DoNotOptimize(gru.Backward(cache, d_out, nullptr, nullptr));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * steps * batch));
}
BENCHMARK(BM_BiGruForwardBackward)->Args({100, 32, 64})->Args({400, 32, 128});

void BM_AttentionAndAnswer(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix f = Gaussian(n, 256, 4);
  const RowVector g = Gaussian(1, 256, 5);
  Rng rng(6);
  std::vector<TokenId> context(static_cast<std::size_t>(n));
  for (auto& t : context) t = kFirstWordId + static_cast<TokenId>(rng.UniformIndex(200));
  std::vector<TokenId> candidates(context.begin(), context.begin() + 10);
  for (auto _ : state) benchmark::DoNotOptimize(AttentionAndAnswer(f, g, candidates, context));
}
BENCHMARK(BM_AttentionAndAnswer)->Arg(100)->Arg(500)->Arg(2000);

void BM_TokenizeBook(benchmark::State& state) {
  std::string text;
  const char* sentences[] = {
      "Call me Ishmael. ", "Mr. Starbuck said, \"There she blows!\" and pointed aft. ",
      "It was the 3rd of May, e.g. the day the whale-ship sailed; nobody cared. ",
      "Don't ask why... the sea doesn't answer. "};
  for (int i = 0; i < 2000; ++i) text += sentences[i % 4];
  const RawBook book{"bench", "Bench", text};
  for (auto _ : state) benchmark::DoNotOptimize(TokenizeBook(book));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_TokenizeBook);

// One optimizer-free training step: batched loss and backward pass.
void BM_ModelLossBackward(benchmark::State& state) {
  SyntheticOptions so;
  so.task = PointingTask::kKeyValue;
  so.count = static_cast<std::size_t>(state.range(0));
  so.max_fillers = 200;
  const auto examples = MakePointingExamples(so);
  const Vocabulary vocab = BuildVocab(examples);
  const auto encoded = EncodeAll(examples, vocab, 1);
  std::vector<const EncodedExample*> ptrs;
  for (const auto& e : encoded) ptrs.push_back(&e);
  const Batch batch = MakeBatch(ptrs);
  ModelConfig config;
  config.vocab_size = vocab.size();
  config.embedding_dim = 64;
  config.hidden = 64;
  config.layers = 1;
  Model model(config);
  model.Initialize(1);
  for (auto _ : state) {
    model.ZeroGrad();
    benchmark::DoNotOptimize(model.Loss(batch, true));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_ModelLossBackward)->Arg(32);

}  // namespace
}  // namespace clozekit

BENCHMARK_MAIN();
