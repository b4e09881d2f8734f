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

#ifndef CLOZEKIT_OPTIM_H_
#define CLOZEKIT_OPTIM_H_

#include <cstdint>
#include <vector>

#include "clozekit/tensor.h"

namespace clozekit {

struct AdamConfig {
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Tensor m;
  Tensor v;
  std::uint64_t t = 0;
};

// One bias-corrected ADAM update of `param` from its `grad`. Frozen
// parameters are left untouched, state included.
void AdamStep(Parameter& param, AdamState& state, const AdamConfig& config);

// ADAM over a fixed parameter list.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig config);

  void Step();
  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  const std::vector<AdamState>& states() const { return states_; }
  std::vector<AdamState>& states() { return states_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<AdamState> states_;
  AdamConfig config_;
};

// Global L2 norm over the gradients of the trainable parameters.
double GlobalGradNorm(const std::vector<Parameter*>& params);

// Rescales every trainable gradient by threshold / norm when the global
// norm exceeds `threshold`. Returns the norm before clipping. Throws
// ValidationError if threshold <= 0.
double ClipGradients(const std::vector<Parameter*>& params, double threshold = 10.0);

// Random matrix with orthonormal columns (rows >= cols) or rows (rows <
// cols), from the QR factorization of a Gaussian draw with the sign of R's
// diagonal folded into Q. Throws ShapeError unless `shape` is 2-D.
Tensor OrthogonalInit(const Shape& shape, std::uint64_t seed);

// Independent uniform draws in [lo, hi].
Tensor UniformInit(const Shape& shape, double lo, double hi, std::uint64_t seed);

}  // namespace clozekit

#endif  // CLOZEKIT_OPTIM_H_
