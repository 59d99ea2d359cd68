// Copyright 2026 The msgm-bench Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msgm/neural/adamw.hpp"

#include <cmath>
#include <string>

#include "msgm/error.hpp"

namespace msgm::neural {

void adamw_step(std::span<double> params, std::span<const double> grads,
                OptimizerState& state, const AdamWConfig& config) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n)
    throw ShapeError("adamw_step: " + std::to_string(n) + " params, " +
                     std::to_string(grads.size()) + " grads, state of " +
                     std::to_string(state.m.size()));
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  const double lr = config.learning_rate, wd = config.weight_decay;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    const double p = params[i];
    params[i] = p - lr * mhat / (std::sqrt(vhat) + config.eps) - lr * wd * p;
  }
}

}  // namespace msgm::neural
