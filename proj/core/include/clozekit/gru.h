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

// Gated recurrent units, reset gate applied before the candidate projection:
//
//   r  = sigmoid(x W_r + h U_r + b_r)
//   z  = sigmoid(x W_z + h U_z + b_z)
//   n  = tanh(x W_n + (r * h) U_n + b_n)
//   h' = (1 - z) * h + z * n
//
// Rows are batch entries. The three gate blocks are stored side by side, so
// W is [input, 3 * hidden], U is [hidden, 3 * hidden] and b is
// [3 * hidden], each ordered reset, update, candidate.
//
// Sequences are time-major: row t * batch + i holds step t of entry i.
// Entry i is only live for t < lengths[i]; past its end the state is carried
// unchanged, so final states are those after the last real token.

#ifndef CLOZEKIT_GRU_H_
#define CLOZEKIT_GRU_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clozekit/tensor.h"

namespace clozekit {

struct GruParams {
  GruParams() = default;
  GruParams(const std::string& name, std::size_t input_dim, std::size_t hidden);

  Parameter w;
  Parameter u;
  Parameter b;

  std::size_t input_dim() const { return w.value.shape()[0]; }
  std::size_t hidden() const { return u.value.shape()[0]; }

  // Each gate block of W and U gets its own orthogonal draw; biases zero.
  void Initialize(std::uint64_t seed);
  std::vector<Parameter*> Parameters() { return {&w, &u, &b}; }
};

struct GruCellCache {
  Matrix x;
  Matrix h;
  Matrix r;
  Matrix z;
  Matrix n;
};

// One step for a batch: x is [batch, input], h is [batch, hidden].
Matrix GruCell(const GruParams& params, const Matrix& x, const Matrix& h,
               GruCellCache* cache = nullptr);

// Gradient of one step given dL/dh'. Adds weight gradients into the
// parameters' grad tensors and writes dL/dx and dL/dh when non-null.
void GruCellBackward(GruParams& params, const GruCellCache& cache, const Matrix& dh_next,
                     Matrix* dx, Matrix* dh);

// Per-layer states of a bidirectional stack; empty vectors mean zeros.
struct BiGruStates {
  std::vector<Matrix> forward;
  std::vector<Matrix> backward;
};

struct BiGruResult {
  Matrix outputs;  // [steps * batch, 2 * hidden], [forward | backward]
  BiGruStates final_states;  // per layer, [batch, hidden]
};

struct GruDirectionTrace {
  Matrix h_prev;
  Matrix r;
  Matrix z;
  Matrix n;
};

struct BiGruCache {
  std::vector<std::size_t> lengths;
  std::size_t steps = 0;
  std::vector<Matrix> inputs;  // per layer
  std::vector<std::array<GruDirectionTrace, 2>> traces;
};

// Stacked bidirectional GRU. Layer k > 0 reads the per-step [forward |
// backward] outputs of layer k - 1.
class BiGru {
 public:
  BiGru() = default;
  BiGru(const std::string& name, std::size_t input_dim, std::size_t hidden,
        std::size_t layers);

  std::size_t input_dim() const { return layers_.front()[0].input_dim(); }
  std::size_t hidden() const { return layers_.front()[0].hidden(); }
  std::size_t layers() const { return layers_.size(); }
  GruParams& direction(std::size_t layer, std::size_t dir) { return layers_.at(layer).at(dir); }
  const GruParams& direction(std::size_t layer, std::size_t dir) const {
    return layers_.at(layer).at(dir);
  }

  void Initialize(std::uint64_t seed);
  std::vector<Parameter*> Parameters();

  // `inputs` is [steps * batch, input_dim] with batch = lengths.size().
  // Throws ValidationError on an empty batch or a length outside
  // [1, steps], ShapeError on mismatched dimensions.
  BiGruResult Forward(const Matrix& inputs, std::span<const std::size_t> lengths,
                      const BiGruStates* initial = nullptr, BiGruCache* cache = nullptr) const;

  // Backpropagates dL/d(outputs) (may be empty, meaning zero) and dL/d(final
  // states) (may be null). Adds parameter gradients, returns dL/d(inputs) and
  // fills dL/d(initial states) when requested.
  Matrix Backward(const BiGruCache& cache, const Matrix& d_outputs,
                  const BiGruStates* d_final, BiGruStates* d_initial);

 private:
  std::vector<std::array<GruParams, 2>> layers_;
};

}  // namespace clozekit

#endif  // CLOZEKIT_GRU_H_
