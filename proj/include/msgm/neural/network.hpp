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
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msgm/rng.hpp"

namespace msgm::neural {

enum class Arch { kLstm, kTransformer, kPersistence };

std::string to_string(Arch arch);
// Accepts "lstm", "transformer", "persistence".
Arch arch_from_string(std::string_view name);

struct ModelSpec {
  Arch arch = Arch::kLstm;
  std::size_t input_features = 6;  // F + 1, target history included
  std::size_t lookback = 96;
  std::size_t horizon = 4;
  std::size_t hidden = 32;
  std::size_t layers = 1;
  std::size_t heads = 1;  // transformer only
  double dropout = 0.0;

  void validate() const;
  bool operator==(const ModelSpec&) const = default;
};

// A named [rows x cols] block of the flat parameter vector.
struct ParamSlice {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
};

class ParamLayout {
 public:
  std::size_t add(std::string name, std::size_t rows, std::size_t cols = 1);
  const std::vector<ParamSlice>& slices() const { return slices_; }
  std::size_t total() const { return total_; }
  const ParamSlice& find(std::string_view name) const;

 private:
  std::vector<ParamSlice> slices_;
  std::size_t total_ = 0;
};

// Inverted dropout with masks derived from a per-example key, so a mask is a
// pure function of (key, site) and backward can recompute it.
struct DropoutMask {
  double rate = 0.0;
  std::uint64_t key = 0;

  bool active() const { return rate > 0.0; }
  // Multiplier for a site: 0 or 1 / (1 - rate).
  double factor(std::uint64_t site) const {
    if (!active()) return 1.0;
    const double u = unit_from_bits(splitmix64(key ^ splitmix64(site)));
    return u < rate ? 0.0 : 1.0 / (1.0 - rate);
  }
};

// Per-thread scratch and activation cache for one example.
class Workspace {
 public:
  virtual ~Workspace() = default;
};

// A forecasting model over a single [L x C] window. forward() caches what
// backward() needs in the workspace; backward() accumulates into `grad`.
class Network {
 public:
  explicit Network(ModelSpec spec) : spec_(std::move(spec)) {}
  virtual ~Network() = default;

  const ModelSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }
  std::size_t param_count() const { return layout_.total(); }

  virtual void init_params(std::span<double> params, std::uint64_t seed) const = 0;
  virtual std::unique_ptr<Workspace> make_workspace() const = 0;

  virtual void forward(std::span<const double> params, std::span<const double> x,
                       std::span<double> out, Workspace& ws,
                       const DropoutMask& dropout) const = 0;

  virtual void backward(std::span<const double> params, std::span<const double> x,
                        std::span<const double> dout, std::span<double> grad,
                        Workspace& ws, const DropoutMask& dropout) const = 0;

 protected:
  ModelSpec spec_;
  ParamLayout layout_;
};

std::unique_ptr<Network> make_network(const ModelSpec& spec);

}  // namespace msgm::neural
