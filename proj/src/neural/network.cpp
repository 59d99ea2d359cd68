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

#include "msgm/neural/network.hpp"

#include "architectures.hpp"
#include "msgm/error.hpp"

namespace msgm::neural {

std::string to_string(Arch arch) {
  switch (arch) {
    case Arch::kLstm: return "lstm";
    case Arch::kTransformer: return "transformer";
    case Arch::kPersistence: return "persistence";
  }
  return "unknown";
}

Arch arch_from_string(std::string_view name) {
  if (name == "lstm") return Arch::kLstm;
  if (name == "transformer") return Arch::kTransformer;
  if (name == "persistence") return Arch::kPersistence;
  throw InvalidArgument("unknown architecture '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  if (input_features < 1) throw InvalidArgument("model: input_features must be >= 1");
  if (lookback < 1 || horizon < 1)
    throw InvalidArgument("model: lookback and horizon must be >= 1");
  if (!(dropout >= 0.0 && dropout <= 0.5))
    throw InvalidArgument("model: dropout must be in [0, 0.5]");
  if (arch == Arch::kPersistence) return;
  if (hidden < 1 || layers < 1) throw InvalidArgument("model: hidden and layers must be >= 1");
  if (arch == Arch::kTransformer && (heads < 1 || hidden % heads != 0))
    throw InvalidArgument("model: hidden size must be divisible by the head count");
}

std::size_t ParamLayout::add(std::string name, std::size_t rows, std::size_t cols) {
  const std::size_t offset = total_;
  slices_.push_back({std::move(name), offset, rows, cols});
  total_ += rows * cols;
  return offset;
}

const ParamSlice& ParamLayout::find(std::string_view name) const {
  for (const auto& s : slices_)
    if (s.name == name) return s;
  throw InvalidArgument("no parameter slice named '" + std::string(name) + "'");
}

std::unique_ptr<Network> make_network(const ModelSpec& spec) {
  spec.validate();
  switch (spec.arch) {
    case Arch::kLstm: return std::make_unique<LstmNetwork>(spec);
    case Arch::kTransformer: return std::make_unique<TransformerNetwork>(spec);
    case Arch::kPersistence: return std::make_unique<PersistenceNetwork>(spec);
  }
  throw InvalidArgument("unknown architecture");
}

}  // namespace msgm::neural
