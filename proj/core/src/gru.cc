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

#include "clozekit/gru.h"

#include "clozekit/error.h"
#include "clozekit/optim.h"
#include "clozekit/random.h"

namespace clozekit {
namespace {

using Index = Eigen::Index;

std::string Dims(Index rows, Index cols) {
  return "[" + std::to_string(rows) + ", " + std::to_string(cols) + "]";
}

// One step from precomputed x W + b. Writes the gate activations and the
// new state.
void StepForward(const Eigen::Ref<const Matrix>& xw, const Matrix& h, const ConstMatrixMap& u,
                 Matrix& r, Matrix& z, Matrix& n, Matrix& h_next) {
  const Index hidden = h.cols();
  Matrix a = xw.leftCols(2 * hidden);
  a.noalias() += h * u.leftCols(2 * hidden);
  r = Sigmoid(a.leftCols(hidden));
  z = Sigmoid(a.rightCols(hidden));
  Matrix an = xw.rightCols(hidden);
  an.noalias() += r.cwiseProduct(h) * u.rightCols(hidden);
  n = Tanh(an);
  h_next = h + z.cwiseProduct(n - h);
}

// Gradient of one step w.r.t. the pre-activations (da = [da_r | da_z |
// da_n]) and the previous state.
void StepBackward(const Matrix& dh_next, const Eigen::Ref<const Matrix>& h,
                  const Eigen::Ref<const Matrix>& r, const Eigen::Ref<const Matrix>& z,
                  const Eigen::Ref<const Matrix>& n, const ConstMatrixMap& u, Matrix& da,
                  Matrix& dh) {
  const Index batch = h.rows();
  const Index hidden = h.cols();
  const Matrix dn = dh_next.cwiseProduct(z);
  const Matrix dz = dh_next.cwiseProduct(n - h);
  dh = dh_next - dh_next.cwiseProduct(z);

  da.setZero(batch, 3 * hidden);
  Matrix da_n = Matrix::Zero(batch, hidden);
  TanhBackward(n, dn, &da_n);
  Matrix dq(batch, hidden);
  dq.noalias() = da_n * u.rightCols(hidden).transpose();
  dh += dq.cwiseProduct(r);
  Matrix da_r = Matrix::Zero(batch, hidden);
  SigmoidBackward(r, dq.cwiseProduct(h), &da_r);
  Matrix da_z = Matrix::Zero(batch, hidden);
  SigmoidBackward(z, dz, &da_z);
  da << da_r, da_z, da_n;
  dh.noalias() += da.leftCols(2 * hidden) * u.leftCols(2 * hidden).transpose();
}

// Adds the weight gradients implied by pre-activation gradients `da` for
// inputs `x` and previous states `h` (rows aligned).
void AccumulateWeightGrads(GruParams& p, const Matrix& x, const Eigen::Ref<const Matrix>& h,
                           const Eigen::Ref<const Matrix>& r, const Matrix& da) {
  const Index hidden = static_cast<Index>(p.hidden());
  MatrixMap dw = p.w.grad.matrix();
  MatrixMap du = p.u.grad.matrix();
  MatrixMap db = p.b.grad.matrix();
  dw.noalias() += x.transpose() * da;
  du.leftCols(2 * hidden).noalias() += h.transpose() * da.leftCols(2 * hidden);
  du.rightCols(hidden).noalias() += r.cwiseProduct(h).transpose() * da.rightCols(hidden);
  db += da.colwise().sum();
}

bool IsLive(std::size_t t, std::size_t length) { return t < length; }

void RunDirection(const GruParams& p, const Matrix& input, std::span<const std::size_t> lengths,
                  std::size_t steps, bool reverse, const Matrix* h0, Matrix& outputs,
                  Index out_col, Matrix& final_state, GruDirectionTrace* trace) {
  const auto batch = static_cast<Index>(lengths.size());
  const auto hidden = static_cast<Index>(p.hidden());
  Matrix xw(input.rows(), 3 * hidden);
  xw.noalias() = input * p.w.value.matrix();
  xw.rowwise() += p.b.value.matrix().row(0);
  const ConstMatrixMap u = std::as_const(p.u.value).matrix();

  Matrix h = h0 ? *h0 : Matrix::Zero(batch, hidden);
  if (trace) {
    const Index rows = static_cast<Index>(steps) * batch;
    trace->h_prev.resize(rows, hidden);
    trace->r.resize(rows, hidden);
    trace->z.resize(rows, hidden);
    trace->n.resize(rows, hidden);
  }
  Matrix r, z, n, h_next;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    const Index row0 = static_cast<Index>(t) * batch;
    StepForward(xw.middleRows(row0, batch), h, u, r, z, n, h_next);
    for (Index i = 0; i < batch; ++i) {
      if (!IsLive(t, lengths[static_cast<std::size_t>(i)])) h_next.row(i) = h.row(i);
    }
    if (trace) {
      trace->h_prev.middleRows(row0, batch) = h;
      trace->r.middleRows(row0, batch) = r;
      trace->z.middleRows(row0, batch) = z;
      trace->n.middleRows(row0, batch) = n;
    }
    h.swap(h_next);
    outputs.block(row0, out_col, batch, hidden) = h;
  }
  final_state = std::move(h);
}

Matrix BackwardDirection(GruParams& p, const GruDirectionTrace& trace, const Matrix& input,
                         std::span<const std::size_t> lengths, std::size_t steps, bool reverse,
                         const Matrix& d_outputs, Index out_col, const Matrix* d_final,
                         Matrix* d_initial) {
  const auto batch = static_cast<Index>(lengths.size());
  const auto hidden = static_cast<Index>(p.hidden());
  const ConstMatrixMap u = std::as_const(p.u.value).matrix();

  Matrix dh = d_final ? *d_final : Matrix::Zero(batch, hidden);
  Matrix da_all(static_cast<Index>(steps) * batch, 3 * hidden);
  Matrix da, dh_prev;
  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    const Index row0 = static_cast<Index>(t) * batch;
    if (d_outputs.size() > 0) dh += d_outputs.block(row0, out_col, batch, hidden);
    Matrix dh_next = dh;
    for (Index i = 0; i < batch; ++i) {
      if (!IsLive(t, lengths[static_cast<std::size_t>(i)])) dh_next.row(i).setZero();
    }
    StepBackward(dh_next, trace.h_prev.middleRows(row0, batch), trace.r.middleRows(row0, batch),
                 trace.z.middleRows(row0, batch), trace.n.middleRows(row0, batch), u, da,
                 dh_prev);
    for (Index i = 0; i < batch; ++i) {
      if (!IsLive(t, lengths[static_cast<std::size_t>(i)])) dh_prev.row(i) = dh.row(i);
    }
    da_all.middleRows(row0, batch) = da;
    dh.swap(dh_prev);
  }
  if (d_initial) *d_initial = dh;
  AccumulateWeightGrads(p, input, trace.h_prev, trace.r, da_all);
  Matrix d_input(input.rows(), input.cols());
  d_input.noalias() = da_all * p.w.value.matrix().transpose();
  return d_input;
}

}  // namespace

GruParams::GruParams(const std::string& name, std::size_t input_dim, std::size_t hidden)
    : w(name + ".w", Tensor({input_dim, 3 * hidden})),
      u(name + ".u", Tensor({hidden, 3 * hidden})),
      b(name + ".b", Tensor({3 * hidden})) {
  if (input_dim == 0 || hidden == 0) throw ValidationError(name + ": dimensions must be >= 1");
}

void GruParams::Initialize(std::uint64_t seed) {
  const auto in = input_dim();
  const auto h = hidden();
  const auto hi = static_cast<Index>(h);
  for (std::size_t gate = 0; gate < 3; ++gate) {
    const auto col = static_cast<Index>(gate) * hi;
    w.value.matrix().middleCols(col, hi) = OrthogonalInit({in, h}, MixSeed(seed, 2 * gate)).matrix();
    u.value.matrix().middleCols(col, hi) =
        OrthogonalInit({h, h}, MixSeed(seed, 2 * gate + 1)).matrix();
  }
  b.value.Fill(0.0);
}

Matrix GruCell(const GruParams& params, const Matrix& x, const Matrix& h, GruCellCache* cache) {
  const auto hidden = static_cast<Index>(params.hidden());
  if (x.cols() != static_cast<Index>(params.input_dim()) || h.cols() != hidden ||
      x.rows() != h.rows()) {
    throw ShapeError("gru cell: input " + Dims(x.rows(), x.cols()) + " and state " +
                     Dims(h.rows(), h.cols()) + " do not fit weights " +
                     ShapeString(params.w.value.shape()));
  }
  Matrix xw(x.rows(), 3 * hidden);
  xw.noalias() = x * params.w.value.matrix();
  xw.rowwise() += params.b.value.matrix().row(0);
  Matrix r, z, n, h_next;
  StepForward(xw, h, params.u.value.matrix(), r, z, n, h_next);
  if (cache) {
    cache->x = x;
    cache->h = h;
    cache->r = std::move(r);
    cache->z = std::move(z);
    cache->n = std::move(n);
  }
  return h_next;
}

void GruCellBackward(GruParams& params, const GruCellCache& cache, const Matrix& dh_next,
                     Matrix* dx, Matrix* dh) {
  Matrix da, dh_prev;
  StepBackward(dh_next, cache.h, cache.r, cache.z, cache.n,
               std::as_const(params.u.value).matrix(), da, dh_prev);
  AccumulateWeightGrads(params, cache.x, cache.h, cache.r, da);
  if (dx) *dx = da * params.w.value.matrix().transpose();
  if (dh) *dh = std::move(dh_prev);
}

BiGru::BiGru(const std::string& name, std::size_t input_dim, std::size_t hidden,
             std::size_t layers) {
  if (layers == 0) throw ValidationError(name + ": at least one layer required");
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : 2 * hidden;
    const std::string prefix = name + ".l" + std::to_string(l);
    layers_.push_back({GruParams(prefix + ".fwd", in, hidden),
                       GruParams(prefix + ".bwd", in, hidden)});
  }
}

void BiGru::Initialize(std::uint64_t seed) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (std::size_t d = 0; d < 2; ++d) layers_[l][d].Initialize(MixSeed(seed, 2 * l + d));
  }
}

std::vector<Parameter*> BiGru::Parameters() {
  std::vector<Parameter*> out;
  for (auto& layer : layers_) {
    for (auto& dir : layer) {
      for (Parameter* p : dir.Parameters()) out.push_back(p);
    }
  }
  return out;
}

BiGruResult BiGru::Forward(const Matrix& inputs, std::span<const std::size_t> lengths,
                           const BiGruStates* initial, BiGruCache* cache) const {
  const auto batch = static_cast<Index>(lengths.size());
  if (batch == 0 || inputs.rows() == 0) throw ValidationError("bigru: empty sequence batch");
  if (inputs.rows() % batch != 0 || inputs.cols() != static_cast<Index>(input_dim())) {
    throw ShapeError("bigru: inputs " + Dims(inputs.rows(), inputs.cols()) +
                     " do not fit batch " + std::to_string(batch) + " and input size " +
                     std::to_string(input_dim()));
  }
  const auto steps = static_cast<std::size_t>(inputs.rows() / batch);
  for (std::size_t len : lengths) {
    if (len == 0 || len > steps) {
      throw ValidationError("bigru: sequence length " + std::to_string(len) +
                            " outside [1, " + std::to_string(steps) + "]");
    }
  }
  const auto hidden = static_cast<Index>(this->hidden());
  auto initial_state = [&](const std::vector<Matrix>* states, std::size_t layer) -> const Matrix* {
    if (!states || states->empty()) return nullptr;
    if (states->size() != layers_.size()) {
      throw ShapeError("bigru: " + std::to_string(states->size()) +
                       " initial states for " + std::to_string(layers_.size()) + " layers");
    }
    const Matrix& m = (*states)[layer];
    if (m.rows() != batch || m.cols() != hidden) {
      throw ShapeError("bigru: initial state " + Dims(m.rows(), m.cols()) + ", expected " +
                       Dims(batch, hidden));
    }
    return &m;
  };

  if (cache) {
    cache->lengths.assign(lengths.begin(), lengths.end());
    cache->steps = steps;
    cache->inputs.resize(layers_.size());
    cache->traces.resize(layers_.size());
  }
  BiGruResult result;
  result.final_states.forward.resize(layers_.size());
  result.final_states.backward.resize(layers_.size());
  Matrix layer_input = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix outputs(inputs.rows(), 2 * hidden);
    for (std::size_t d = 0; d < 2; ++d) {
      const Matrix* h0 = initial_state(initial ? (d == 0 ? &initial->forward : &initial->backward)
                                               : nullptr,
                                       l);
      Matrix& final_state = d == 0 ? result.final_states.forward[l] : result.final_states.backward[l];
      RunDirection(layers_[l][d], layer_input, lengths, steps, d == 1, h0, outputs,
                   static_cast<Index>(d) * hidden, final_state,
                   cache ? &cache->traces[l][d] : nullptr);
    }
    if (cache) cache->inputs[l] = std::move(layer_input);
    layer_input = std::move(outputs);
  }
  result.outputs = std::move(layer_input);
  return result;
}

Matrix BiGru::Backward(const BiGruCache& cache, const Matrix& d_outputs,
                       const BiGruStates* d_final, BiGruStates* d_initial) {
  if (cache.traces.size() != layers_.size()) {
    throw ValidationError("bigru: backward called without a matching forward cache");
  }
  const auto hidden = static_cast<Index>(this->hidden());
  auto final_grad = [&](const std::vector<Matrix>& states, std::size_t layer) -> const Matrix* {
    if (states.empty() || states[layer].size() == 0) return nullptr;
    return &states[layer];
  };
  if (d_initial) {
    d_initial->forward.assign(layers_.size(), Matrix());
    d_initial->backward.assign(layers_.size(), Matrix());
  }
  Matrix d_layer_out = d_outputs;
  Matrix d_input;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Matrix& input = cache.inputs[l];
    for (std::size_t d = 0; d < 2; ++d) {
      const Matrix* df = d_final ? final_grad(d == 0 ? d_final->forward : d_final->backward, l)
                                 : nullptr;
      Matrix* di = d_initial ? &(d == 0 ? d_initial->forward : d_initial->backward)[l] : nullptr;
      Matrix contribution =
          BackwardDirection(layers_[l][d], cache.traces[l][d], input, cache.lengths, cache.steps,
                            d == 1, d_layer_out, static_cast<Index>(d) * hidden, df, di);
      if (d == 0) {
        d_input = std::move(contribution);
      } else {
        d_input += contribution;
      }
    }
    d_layer_out = d_input;
  }
  return d_input;
}

}  // namespace clozekit
