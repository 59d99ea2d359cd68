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

#include <cstddef>
#include <span>
#include <vector>

namespace msgm {

// Unit markers for forecast/target blocks. Metrics accept only Celsius
// blocks; model outputs are Normalized until inverted by a Normalizer.
struct Celsius {};
struct Normalized {};

// Row-major [n x h] block of target values, one row per window.
template <typename Unit>
struct TargetBlock {
  std::size_t n = 0;
  std::size_t h = 0;
  std::vector<double> values;

  TargetBlock() = default;
  TargetBlock(std::size_t rows, std::size_t horizon)
      : n(rows), h(horizon), values(rows * horizon, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return values[i * h + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * h + j]; }
  std::span<double> row(std::size_t i) { return {values.data() + i * h, h}; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * h, h};
  }
};

using CelsiusBlock = TargetBlock<Celsius>;
using NormalizedBlock = TargetBlock<Normalized>;

}  // namespace msgm
