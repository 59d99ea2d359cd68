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

#include "architectures.hpp"

namespace msgm::neural {

PersistenceNetwork::PersistenceNetwork(const ModelSpec& spec) : Network(spec) {}

std::unique_ptr<Workspace> PersistenceNetwork::make_workspace() const {
  return std::make_unique<Workspace>();
}

void PersistenceNetwork::forward(std::span<const double>, std::span<const double> x,
                                 std::span<double> out, Workspace&,
                                 const DropoutMask&) const {
  const std::size_t C = spec_.input_features;
  const double last = x[(spec_.lookback - 1) * C + (C - 1)];
  for (double& y : out) y = last;
}

}  // namespace msgm::neural
