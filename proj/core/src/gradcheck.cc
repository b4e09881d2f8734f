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

#include "clozekit/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "clozekit/error.h"

namespace clozekit {
namespace {

void Record(GradCheckResult& result, double analytic, double numeric,
            const std::string& name, std::size_t index) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  const double err = std::abs(analytic - numeric) / denom;
  ++result.coordinates;
  if (err > result.max_relative_error || result.coordinates == 1) {
    result.max_relative_error = err;
    result.worst_parameter = name;
    result.worst_index = index;
    result.analytic = analytic;
    result.numeric = numeric;
  }
}

}  // namespace

GradCheckResult FiniteDifferenceCheck(const std::function<double()>& loss,
                                      const std::vector<Parameter*>& params,
                                      const std::vector<Tensor>& analytic_grads,
                                      double step, std::size_t max_coordinates_per_param) {
  if (params.size() != analytic_grads.size()) {
    throw ShapeError("gradient check: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(analytic_grads.size()) + " gradients");
  }
  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& value = params[p]->value;
    if (analytic_grads[p].shape() != value.shape()) {
      throw ShapeError("gradient check: " + params[p]->name + " has shape " +
                       ShapeString(value.shape()) + ", gradient " +
                       ShapeString(analytic_grads[p].shape()));
    }
    const std::size_t n = value.size();
    std::size_t stride = 1;
    if (max_coordinates_per_param > 0 && n > max_coordinates_per_param) {
      stride = (n + max_coordinates_per_param - 1) / max_coordinates_per_param;
    }
    for (std::size_t i = 0; i < n; i += stride) {
      const double saved = value[i];
      value[i] = saved + step;
      const double plus = loss();
      value[i] = saved - step;
      const double minus = loss();
      value[i] = saved;
      Record(result, analytic_grads[p][i], (plus - minus) / (2 * step), params[p]->name, i);
    }
  }
  return result;
}

GradCheckResult FiniteDifferenceCheck(const std::function<double(const Tensor&)>& f,
                                      const std::function<Tensor(const Tensor&)>& gradient,
                                      const Tensor& x, double step) {
  const Tensor analytic = gradient(x);
  if (analytic.shape() != x.shape()) {
    throw ShapeError("gradient check: input shape " + ShapeString(x.shape()) +
                     ", gradient " + ShapeString(analytic.shape()));
  }
  GradCheckResult result;
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double plus = f(probe);
    probe[i] = x[i] - step;
    const double minus = f(probe);
    probe[i] = x[i];
    Record(result, analytic[i], (plus - minus) / (2 * step), "x", i);
  }
  return result;
}

}  // namespace clozekit
