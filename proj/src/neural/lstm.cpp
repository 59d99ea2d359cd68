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

#include <algorithm>
#include <cmath>

#include "architectures.hpp"
#include "msgm/neural/kernels.hpp"

namespace msgm::neural {

namespace k = kernels;

namespace {

// Gate blocks within the 4H pre-activation vector.
enum Gate : std::size_t { kInput = 0, kForget = 1, kCell = 2, kOutput = 3 };

struct LstmWorkspace final : Workspace {
  // Per layer, [L x 4H] post-activation gates, [L x H] cell, tanh(cell),
  // hidden state and dropout-scaled output fed to the next layer.
  std::vector<std::vector<double>> gates, cell, tanh_cell, hidden, dropped;
  // Backward scratch.
  std::vector<double> dz, dh, dc, dh_rec, dc_rec;
  std::vector<std::vector<double>> d_out;  // [L x H] grad wrt each layer's output

  LstmWorkspace(std::size_t layers, std::size_t L, std::size_t H)
      : gates(layers, std::vector<double>(L * 4 * H)),
        cell(layers, std::vector<double>(L * H)),
        tanh_cell(layers, std::vector<double>(L * H)),
        hidden(layers, std::vector<double>(L * H)),
        dropped(layers, std::vector<double>(L * H)),
        dz(4 * H),
        dh(H),
        dc(H),
        dh_rec(H),
        dc_rec(H),
        d_out(layers, std::vector<double>(L * H)) {}
};

std::uint64_t site(std::size_t layer, std::size_t t, std::size_t j, std::size_t L,
                   std::size_t H) {
  return (static_cast<std::uint64_t>(layer) * L + t) * H + j;
}

}  // namespace

LstmNetwork::LstmNetwork(const ModelSpec& spec) : Network(spec) {
  const std::size_t H = spec_.hidden;
  for (std::size_t l = 0; l < spec_.layers; ++l) {
    const std::size_t in = l == 0 ? spec_.input_features : H;
    const std::string p = "lstm." + std::to_string(l) + ".";
    LayerSlices s;
    s.in = in;
    s.w_ih = layout_.add(p + "w_ih", 4 * H, in);
    s.w_hh = layout_.add(p + "w_hh", 4 * H, H);
    s.bias = layout_.add(p + "bias", 4 * H);
    layers_.push_back(s);
  }
  head_w_ = layout_.add("head.weight", spec_.horizon, H);
  head_b_ = layout_.add("head.bias", spec_.horizon);
}

void LstmNetwork::init_params(std::span<double> params, std::uint64_t seed) const {
  Rng rng(derive_seed(seed, {0x157Du}));
  const double bound = 1.0 / std::sqrt(static_cast<double>(spec_.hidden));
  for (const auto& s : layout_.slices())
    for (std::size_t i = 0; i < s.size(); ++i)
      params[s.offset + i] = rng.uniform(-bound, bound);
}

std::unique_ptr<Workspace> LstmNetwork::make_workspace() const {
  return std::make_unique<LstmWorkspace>(spec_.layers, spec_.lookback, spec_.hidden);
}

void LstmNetwork::forward(std::span<const double> params, std::span<const double> x,
                          std::span<double> out, Workspace& base,
                          const DropoutMask& dropout) const {
  auto& ws = static_cast<LstmWorkspace&>(base);
  const std::size_t L = spec_.lookback, H = spec_.hidden, C = spec_.input_features;
  const double* p = params.data();

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& s = layers_[l];
    const double* w_ih = p + s.w_ih;
    const double* w_hh = p + s.w_hh;
    const double* bias = p + s.bias;
    double* gates = ws.gates[l].data();
    double* cell = ws.cell[l].data();
    double* tcell = ws.tanh_cell[l].data();
    double* hid = ws.hidden[l].data();
    const bool last_layer = l + 1 == layers_.size();

    for (std::size_t t = 0; t < L; ++t) {
      const double* u = l == 0 ? x.data() + t * C : ws.dropped[l - 1].data() + t * H;
      double* z = gates + t * 4 * H;
      k::affine(w_ih, bias, u, z, 4 * H, s.in);
      if (t > 0) k::matvec_acc(w_hh, hid + (t - 1) * H, z, 4 * H, H);
      for (std::size_t j = 0; j < H; ++j) {
        const double ig = k::sigmoid(z[kInput * H + j]);
        const double fg = k::sigmoid(z[kForget * H + j]);
        const double gg = std::tanh(z[kCell * H + j]);
        const double og = k::sigmoid(z[kOutput * H + j]);
        z[kInput * H + j] = ig;
        z[kForget * H + j] = fg;
        z[kCell * H + j] = gg;
        z[kOutput * H + j] = og;
        const double c_prev = t > 0 ? cell[(t - 1) * H + j] : 0.0;
        const double c = fg * c_prev + ig * gg;
        const double tc = std::tanh(c);
        cell[t * H + j] = c;
        tcell[t * H + j] = tc;
        hid[t * H + j] = og * tc;
      }
      if (!last_layer) {
        double* d = ws.dropped[l].data() + t * H;
        for (std::size_t j = 0; j < H; ++j)
          d[j] = hid[t * H + j] * dropout.factor(site(l, t, j, L, H));
      }
    }
  }
  const double* h_last = ws.hidden.back().data() + (L - 1) * H;
  k::affine(p + head_w_, p + head_b_, h_last, out.data(), spec_.horizon, H);
}

void LstmNetwork::backward(std::span<const double> params, std::span<const double> x,
                           std::span<const double> dout, std::span<double> grad,
                           Workspace& base, const DropoutMask& dropout) const {
  auto& ws = static_cast<LstmWorkspace&>(base);
  const std::size_t L = spec_.lookback, H = spec_.hidden, C = spec_.input_features;
  const double* p = params.data();
  double* g = grad.data();

  const double* h_last = ws.hidden.back().data() + (L - 1) * H;
  k::outer_acc(dout.data(), h_last, g + head_w_, spec_.horizon, H);
  k::axpy(1.0, dout.data(), g + head_b_, spec_.horizon);

  auto& top = ws.d_out.back();
  std::fill(top.begin(), top.end(), 0.0);
  k::matvec_t_acc(p + head_w_, dout.data(), top.data() + (L - 1) * H, spec_.horizon, H);

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& s = layers_[li];
    const double* w_ih = p + s.w_ih;
    const double* w_hh = p + s.w_hh;
    const double* gates = ws.gates[li].data();
    const double* cell = ws.cell[li].data();
    const double* tcell = ws.tanh_cell[li].data();
    const double* hid = ws.hidden[li].data();
    const double* d_above = ws.d_out[li].data();
    double* d_below = li > 0 ? ws.d_out[li - 1].data() : nullptr;
    if (d_below) std::fill(ws.d_out[li - 1].begin(), ws.d_out[li - 1].end(), 0.0);

    std::fill(ws.dh_rec.begin(), ws.dh_rec.end(), 0.0);
    std::fill(ws.dc_rec.begin(), ws.dc_rec.end(), 0.0);
    for (std::size_t t = L; t-- > 0;) {
      const double* z = gates + t * 4 * H;
      double* dz = ws.dz.data();
      for (std::size_t j = 0; j < H; ++j) {
        const double ig = z[kInput * H + j];
        const double fg = z[kForget * H + j];
        const double gg = z[kCell * H + j];
        const double og = z[kOutput * H + j];
        const double tc = tcell[t * H + j];
        const double dh = d_above[t * H + j] + ws.dh_rec[j];
        const double dc = ws.dc_rec[j] + dh * og * (1.0 - tc * tc);
        const double c_prev = t > 0 ? cell[(t - 1) * H + j] : 0.0;
        dz[kInput * H + j] = dc * gg * ig * (1.0 - ig);
        dz[kForget * H + j] = dc * c_prev * fg * (1.0 - fg);
        dz[kCell * H + j] = dc * ig * (1.0 - gg * gg);
        dz[kOutput * H + j] = dh * tc * og * (1.0 - og);
        ws.dc_rec[j] = dc * fg;
      }
      const double* u = li == 0 ? x.data() + t * C : ws.dropped[li - 1].data() + t * H;
      k::outer_acc(dz, u, g + s.w_ih, 4 * H, s.in);
      k::axpy(1.0, dz, g + s.bias, 4 * H);
      std::fill(ws.dh_rec.begin(), ws.dh_rec.end(), 0.0);
      if (t > 0) {
        k::outer_acc(dz, hid + (t - 1) * H, g + s.w_hh, 4 * H, H);
        k::matvec_t_acc(w_hh, dz, ws.dh_rec.data(), 4 * H, H);
      }
      if (d_below) {
        double* du = d_below + t * H;
        k::matvec_t_acc(w_ih, dz, du, 4 * H, H);
        for (std::size_t j = 0; j < H; ++j)
          du[j] *= dropout.factor(site(li - 1, t, j, L, H));
      }
    }
  }
}

}  // namespace msgm::neural
