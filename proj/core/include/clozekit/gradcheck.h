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

#ifndef CLOZEKIT_GRADCHECK_H_
#define CLOZEKIT_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "clozekit/tensor.h"

namespace clozekit {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

// Compares `analytic_grads` (one per parameter, same shapes) against central
// differences of `loss`, perturbing one parameter value at a time by `step`
// and restoring it afterwards. Relative error per coordinate is
// |a - n| / max(|a|, |n|, 1e-6); the floor sits above the round-off noise of
// a central difference on an O(1) loss. At most `max_coordinates_per_param`
// evenly spaced coordinates are probed per parameter (0 probes all).
GradCheckResult FiniteDifferenceCheck(const std::function<double()>& loss,
                                      const std::vector<Parameter*>& params,
                                      const std::vector<Tensor>& analytic_grads,
                                      double step = 1e-5,
                                      std::size_t max_coordinates_per_param = 0);

// Convenience for plain functions of one tensor: `gradient` fills the
// analytic gradient at x.
GradCheckResult FiniteDifferenceCheck(const std::function<double(const Tensor&)>& f,
                                      const std::function<Tensor(const Tensor&)>& gradient,
                                      const Tensor& x, double step = 1e-5);

}  // namespace clozekit

#endif  // CLOZEKIT_GRADCHECK_H_
