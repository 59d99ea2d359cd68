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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace msgm::neural {

struct AdamWConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  OptimizerState() = default;
  explicit OptimizerState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One AdamW update with decoupled weight decay:
//   p <- p - lr * mhat / (sqrt(vhat) + eps) - lr * wd * p
// Throws ShapeError when params, grads and state disagree in length.
void adamw_step(std::span<double> params, std::span<const double> grads,
                OptimizerState& state, const AdamWConfig& config);

}  // namespace msgm::neural
