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

#include <vector>

#include "msgm/neural/network.hpp"

namespace msgm::neural {

// Stacked LSTM; the last layer's final hidden state feeds an affine head.
// Dropout is applied to the outputs of every layer but the last.
class LstmNetwork final : public Network {
 public:
  explicit LstmNetwork(const ModelSpec& spec);

  void init_params(std::span<double> params, std::uint64_t seed) const override;
  std::unique_ptr<Workspace> make_workspace() const override;
  void forward(std::span<const double> params, std::span<const double> x,
               std::span<double> out, Workspace& ws,
               const DropoutMask& dropout) const override;
  void backward(std::span<const double> params, std::span<const double> x,
                std::span<const double> dout, std::span<double> grad, Workspace& ws,
                const DropoutMask& dropout) const override;

 private:
  struct LayerSlices {
    std::size_t w_ih, w_hh, bias, in;
  };
  std::vector<LayerSlices> layers_;
  std::size_t head_w_ = 0, head_b_ = 0;
};

// Pre-norm Transformer encoder over the lookback tokens with additive
// sinusoidal positional encoding; the final token feeds the head.
class TransformerNetwork final : public Network {
 public:
  explicit TransformerNetwork(const ModelSpec& spec);

  void init_params(std::span<double> params, std::uint64_t seed) const override;
  std::unique_ptr<Workspace> make_workspace() const override;
  void forward(std::span<const double> params, std::span<const double> x,
               std::span<double> out, Workspace& ws,
               const DropoutMask& dropout) const override;
  void backward(std::span<const double> params, std::span<const double> x,
                std::span<const double> dout, std::span<double> grad, Workspace& ws,
                const DropoutMask& dropout) const override;

  const std::vector<double>& positional_encoding() const { return pe_; }

 private:
  struct LayerSlices {
    std::size_t ln1_g, ln1_b, wq, bq, wk, bk, wv, bv, wo, bo;
    std::size_t ln2_g, ln2_b, w1, b1, w2, b2;
  };
  std::size_t embed_w_ = 0, embed_b_ = 0;
  std::vector<LayerSlices> layers_;
  std::size_t lnf_g_ = 0, lnf_b_ = 0, head_w_ = 0, head_b_ = 0;
  std::vector<double> pe_;  // [L x d]
};

// Repeats the last observed target value over the horizon. No parameters.
class PersistenceNetwork final : public Network {
 public:
  explicit PersistenceNetwork(const ModelSpec& spec);

  void init_params(std::span<double>, std::uint64_t) const override {}
  std::unique_ptr<Workspace> make_workspace() const override;
  void forward(std::span<const double> params, std::span<const double> x,
               std::span<double> out, Workspace& ws,
               const DropoutMask& dropout) const override;
  void backward(std::span<const double>, std::span<const double>,
                std::span<const double>, std::span<double>, Workspace&,
                const DropoutMask&) const override {}
};

}  // namespace msgm::neural
