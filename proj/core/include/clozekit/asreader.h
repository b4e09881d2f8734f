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

// Attention-sum reader.
//
// The document and the question are embedded and read by two separate
// bidirectional GRU stacks. Each document position i gets the contextual
// vector f_i (the top layer's [forward | backward] state) and the question
// becomes g, the concatenated final states of its top layer. Attention is
// softmax(f_i . g) over the whole document, and a candidate word's score is
// the attention summed over every position holding that word.

#ifndef CLOZEKIT_ASREADER_H_
#define CLOZEKIT_ASREADER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "clozekit/gru.h"
#include "clozekit/tensor.h"
#include "clozekit/vocab.h"

namespace clozekit {

struct ModelConfig {
  std::size_t vocab_size = 0;  // total id count, reserved block included
  std::size_t embedding_dim = 128;
  std::size_t hidden = 384;  // per direction
  std::size_t layers = 2;
  // Read the question with the document encoder first and start the
  // document pass from its final states.
  bool query_init = false;

  // Throws ValidationError unless every dimension is >= 1 and the
  // vocabulary covers the reserved block.
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Padded batch of encoded examples. Id matrices are entry-major
// ([batch, width]) and padded with kPadId.
struct Batch {
  std::size_t size() const { return answers.size(); }
  TokenId context_id(std::size_t entry, std::size_t pos) const {
    return context_ids[entry * context_width + pos];
  }
  TokenId question_id(std::size_t entry, std::size_t pos) const {
    return question_ids[entry * question_width + pos];
  }
  // True for real (non-padding) context positions.
  bool live(std::size_t entry, std::size_t pos) const { return pos < context_lengths[entry]; }

  std::size_t context_width = 0;
  std::vector<TokenId> context_ids;
  std::vector<std::size_t> context_lengths;
  std::size_t question_width = 0;
  std::vector<TokenId> question_ids;
  std::vector<std::size_t> question_lengths;
  std::vector<TokenId> answers;
  std::vector<std::vector<TokenId>> candidates;
  std::vector<std::size_t> example_indices;  // positions in the source list
};

// Packs encoded examples (in the given order) into one padded batch.
// Throws ValidationError on an empty context or question.
Batch MakeBatch(const std::vector<const EncodedExample*>& examples,
                const std::vector<std::size_t>& indices = {});

struct Prediction {
  std::vector<TokenId> context;      // document ids, one per position
  std::vector<TokenId> candidates;
  RowVector scores;                  // f_i . g per position
  RowVector attention;               // softmax of scores over the document
  std::vector<double> raw;           // summed attention per candidate
  std::vector<double> probabilities; // raw renormalized over the candidates
  std::size_t predicted = 0;         // index into candidates

  TokenId predicted_id() const { return candidates.at(predicted); }
};

// Candidate aggregation for one document. Probabilities are uniform when no
// candidate occurs in the document; argmax ties go to the earlier candidate.
Prediction AttentionAndAnswer(const Matrix& contextual, const RowVector& question,
                              const std::vector<TokenId>& candidates,
                              const std::vector<TokenId>& context);
Prediction AggregateAttention(RowVector scores, const std::vector<TokenId>& candidates,
                              const std::vector<TokenId>& context);

// -log of the attention mass on `answer`, in log space. Throws
// ValidationError if the answer does not occur in the document.
double AnswerLoss(const Prediction& prediction, TokenId answer);

class Model {
 public:
  Model() = default;
  explicit Model(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }

  // Embeddings uniform in [-0.1, 0.1], GRU matrices orthogonal, biases zero.
  void Initialize(std::uint64_t seed);

  // Every parameter, frozen ones included, in a fixed order.
  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;
  void ZeroGrad();

  // Row of the embedding lookup for an id.
  RowVector Embedding(TokenId id) const;

  // Mean loss over the batch; adds its gradient into the parameters when
  // `backward` is set. Throws ValidationError if an answer is missing from
  // its document.
  double Loss(const Batch& batch, bool backward = false);
  std::vector<Prediction> Predict(const Batch& batch) const;

  // Single-example views.
  Matrix EncodeDocument(const EncodedExample& example) const;
  RowVector EncodeQuestion(const EncodedExample& example) const;
  // Requires config().query_init.
  Matrix QueryInitiatedEncoding(const EncodedExample& example) const;
  Prediction Predict(const EncodedExample& example) const;

  Parameter word_embeddings;       // rows for pad, gap and vocabulary words
  Parameter anonymous_embeddings;  // kNumAnonymous rows, never trained
  BiGru document_encoder;
  BiGru question_encoder;

 private:
  struct Pass;
  void RunForward(const Batch& batch, Pass& pass, bool keep_cache) const;
  Matrix Embed(const std::vector<TokenId>& ids, std::size_t width, std::size_t batch) const;
  void ScatterEmbeddingGrad(const std::vector<TokenId>& ids, std::size_t width,
                            std::size_t batch, const Matrix& d_inputs);

  ModelConfig config_;
};

}  // namespace clozekit

#endif  // CLOZEKIT_ASREADER_H_
