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

// Batched evaluation over window batches. The parallel versions split the
// examples into fixed chunks and reduce chunk gradients in chunk order, so
// results do not depend on the thread count. The *_serial versions are plain
// single-threaded loops kept as test references.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "msgm/neural/network.hpp"
#include "msgm/splitting.hpp"
#include "msgm/units.hpp"

namespace msgm::neural {

inline constexpr std::size_t kReduceChunk = 8;

// Dropout for a training pass. Example at position p of the index list uses
// the mask key derive_seed(seed, {p}).
struct DropoutSpec {
  double rate = 0.0;
  std::uint64_t seed = 0;

  DropoutMask mask_for(std::size_t position) const;
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Throws ShapeError when the batch does not fit the network's spec.
void check_batch(const Network& net, const splitting::WindowBatch& batch);

NormalizedBlock forward_batch(const Network& net, std::span<const double> params,
                              const splitting::WindowBatch& batch);
NormalizedBlock forward_batch_serial(const Network& net,
                                     std::span<const double> params,
                                     const splitting::WindowBatch& batch);

// Normalized targets of every example.
NormalizedBlock batch_targets(const splitting::WindowBatch& batch);

// Mean over n*H squared normalized errors and its gradient, over the examples
// listed in `indices`. Throws EmptyBatch when `indices` is empty.
LossGrad loss_and_grad(const Network& net, std::span<const double> params,
                       const splitting::WindowBatch& batch,
                       std::span<const std::size_t> indices,
                       const DropoutSpec& dropout = {});
LossGrad loss_and_grad_serial(const Network& net, std::span<const double> params,
                              const splitting::WindowBatch& batch,
                              std::span<const std::size_t> indices,
                              const DropoutSpec& dropout = {});

// Convenience overloads over the whole batch.
LossGrad loss_and_grad(const Network& net, std::span<const double> params,
                       const splitting::WindowBatch& batch,
                       const DropoutSpec& dropout = {});

// Root of the mean squared normalized error over the batch.
double normalized_rmse(const Network& net, std::span<const double> params,
                       const splitting::WindowBatch& batch);

}  // namespace msgm::neural
