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

#include "clozekit/optim.h"

#include <cmath>

#include <Eigen/QR>

#include "clozekit/error.h"
#include "clozekit/random.h"

namespace clozekit {

void AdamStep(Parameter& param, AdamState& state, const AdamConfig& config) {
  if (!param.trainable) return;
  if (param.grad.shape() != param.value.shape()) {
    throw ShapeError(param.name + ": gradient shape " + ShapeString(param.grad.shape()) +
                     " differs from value shape " + ShapeString(param.value.shape()));
  }
  if (state.m.shape() != param.value.shape()) {
    state.m = Tensor(param.value.shape());
    state.v = Tensor(param.value.shape());
    state.t = 0;
  }
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  double* value = param.value.data();
  const double* grad = param.grad.data();
  double* m = state.m.data();
  double* v = state.v.data();
  for (std::size_t i = 0; i < param.value.size(); ++i) {
    m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
    v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    value[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

Adam::Adam(std::vector<Parameter*> params, AdamConfig config)
    : params_(std::move(params)), states_(params_.size()), config_(config) {
  if (!(config_.learning_rate > 0)) throw ValidationError("learning rate must be positive");
}

void Adam::Step() {
  for (std::size_t i = 0; i < params_.size(); ++i) AdamStep(*params_[i], states_[i], config_);
}

double GlobalGradNorm(const std::vector<Parameter*>& params) {
  double sum = 0.0;
  for (const Parameter* p : params) {
    if (!p->trainable) continue;
    for (double g : p->grad.values()) sum += g * g;
  }
  return std::sqrt(sum);
}

double ClipGradients(const std::vector<Parameter*>& params, double threshold) {
  if (!(threshold > 0)) throw ValidationError("clipping threshold must be positive");
  const double norm = GlobalGradNorm(params);
  if (norm > threshold) {
    const double scale = threshold / norm;
    for (Parameter* p : params) {
      if (!p->trainable) continue;
      for (double& g : p->grad.values()) g *= scale;
    }
  }
  return norm;
}

Tensor OrthogonalInit(const Shape& shape, std::uint64_t seed) {
  if (shape.size() != 2 || shape[0] == 0 || shape[1] == 0) {
    throw ShapeError("orthogonal init needs a non-empty 2-D shape, got " + ShapeString(shape));
  }
  const bool tall = shape[0] >= shape[1];
  const auto n = static_cast<Eigen::Index>(tall ? shape[0] : shape[1]);
  const auto k = static_cast<Eigen::Index>(tall ? shape[1] : shape[0]);
  Rng rng(seed);
  Eigen::MatrixXd draw(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) draw(i, j) = rng.Gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(draw);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  Tensor out(shape);
  if (tall) {
    out.matrix() = q;
  } else {
    out.matrix() = q.transpose();
  }
  return out;
}

Tensor UniformInit(const Shape& shape, double lo, double hi, std::uint64_t seed) {
  if (!(lo <= hi)) throw ValidationError("uniform init needs lo <= hi");
  Rng rng(seed);
  Tensor out(shape);
  for (double& v : out.values()) v = rng.Uniform(lo, hi);
  return out;
}

}  // namespace clozekit
