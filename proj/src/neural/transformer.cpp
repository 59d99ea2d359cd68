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

constexpr std::size_t kFfnExpansion = 4;

struct LayerCache {
  std::vector<double> e_in;          // [L x d] residual stream entering the layer
  std::vector<double> xhat1, rstd1;  // LN1
  std::vector<double> a;             // LN1 output
  std::vector<double> q, kk, v;      // [L x d]
  std::vector<double> probs;         // [heads x L x L]
  std::vector<double> attn;          // [L x d] concatenated head outputs
  std::vector<double> e_mid;         // after attention residual
  std::vector<double> xhat2, rstd2;  // LN2
  std::vector<double> b;             // LN2 output
  std::vector<double> f1, gact;      // [L x 4d]

  LayerCache(std::size_t L, std::size_t d, std::size_t heads)
      : e_in(L * d), xhat1(L * d), rstd1(L), a(L * d), q(L * d), kk(L * d), v(L * d),
        probs(heads * L * L), attn(L * d), e_mid(L * d), xhat2(L * d), rstd2(L),
        b(L * d), f1(L * d * kFfnExpansion), gact(L * d * kFfnExpansion) {}
};

struct TransformerWorkspace final : Workspace {
  std::vector<LayerCache> layers;
  std::vector<double> e_out;        // [L x d] final residual stream
  std::vector<double> tmp;          // [L x d] projection scratch
  std::vector<double> xhat_f;       // [d]
  double rstd_f = 0;
  std::vector<double> z;            // [d] final LN output
  // Backward scratch.
  std::vector<double> de, dtmp, datt, dq, dk, dv, da, db, df1, dg, dprob, dz;

  TransformerWorkspace(std::size_t n_layers, std::size_t L, std::size_t d,
                       std::size_t heads)
      : e_out(L * d), tmp(L * d), xhat_f(d), z(d), de(L * d), dtmp(L * d),
        datt(L * d), dq(L * d), dk(L * d), dv(L * d), da(L * d), db(L * d),
        df1(L * d * kFfnExpansion), dg(L * d * kFfnExpansion), dprob(L), dz(d) {
    layers.reserve(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) layers.emplace_back(L, d, heads);
  }
};

enum DropSite : std::uint64_t { kAttnOut = 0, kFfnOut = 1 };

std::uint64_t site(std::size_t layer, DropSite which, std::size_t t, std::size_t j,
                   std::size_t L, std::size_t d) {
  return ((static_cast<std::uint64_t>(layer) * 2 + which) * L + t) * d + j;
}

}  // namespace

TransformerNetwork::TransformerNetwork(const ModelSpec& spec) : Network(spec) {
  const std::size_t d = spec_.hidden, C = spec_.input_features, L = spec_.lookback;
  const std::size_t ff = d * kFfnExpansion;
  embed_w_ = layout_.add("embed.weight", d, C);
  embed_b_ = layout_.add("embed.bias", d);
  for (std::size_t l = 0; l < spec_.layers; ++l) {
    const std::string p = "enc." + std::to_string(l) + ".";
    LayerSlices s;
    s.ln1_g = layout_.add(p + "ln1.gamma", d);
    s.ln1_b = layout_.add(p + "ln1.beta", d);
    s.wq = layout_.add(p + "attn.wq", d, d);
    s.bq = layout_.add(p + "attn.bq", d);
    s.wk = layout_.add(p + "attn.wk", d, d);
    s.bk = layout_.add(p + "attn.bk", d);
    s.wv = layout_.add(p + "attn.wv", d, d);
    s.bv = layout_.add(p + "attn.bv", d);
    s.wo = layout_.add(p + "attn.wo", d, d);
    s.bo = layout_.add(p + "attn.bo", d);
    s.ln2_g = layout_.add(p + "ln2.gamma", d);
    s.ln2_b = layout_.add(p + "ln2.beta", d);
    s.w1 = layout_.add(p + "ffn.w1", ff, d);
    s.b1 = layout_.add(p + "ffn.b1", ff);
    s.w2 = layout_.add(p + "ffn.w2", d, ff);
    s.b2 = layout_.add(p + "ffn.b2", d);
    layers_.push_back(s);
  }
  lnf_g_ = layout_.add("final_ln.gamma", d);
  lnf_b_ = layout_.add("final_ln.beta", d);
  head_w_ = layout_.add("head.weight", spec_.horizon, d);
  head_b_ = layout_.add("head.bias", spec_.horizon);

  // PE[t, 2i] = sin(t / 10000^(2i/d)), PE[t, 2i+1] = cos(t / 10000^(2i/d)).
  pe_.resize(L * d);
  for (std::size_t t = 0; t < L; ++t)
    for (std::size_t j = 0; j < d; ++j) {
      const double freq =
          std::pow(10000.0, -static_cast<double>(j - j % 2) / static_cast<double>(d));
      const double angle = static_cast<double>(t) * freq;
      pe_[t * d + j] = j % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
}

void TransformerNetwork::init_params(std::span<double> params, std::uint64_t seed) const {
  Rng rng(derive_seed(seed, {0x7F0Bu}));
  std::fill(params.begin(), params.end(), 0.0);
  for (const auto& s : layout_.slices()) {
    const bool is_gamma = s.name.ends_with(".gamma");
    if (is_gamma) {
      std::fill_n(params.begin() + s.offset, s.size(), 1.0);
    } else if (s.cols > 1) {
      // Xavier-uniform.
      const double bound = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
      for (std::size_t i = 0; i < s.size(); ++i)
        params[s.offset + i] = rng.uniform(-bound, bound);
    }
  }
}

std::unique_ptr<Workspace> TransformerNetwork::make_workspace() const {
  return std::make_unique<TransformerWorkspace>(spec_.layers, spec_.lookback,
                                                spec_.hidden, spec_.heads);
}

void TransformerNetwork::forward(std::span<const double> params,
                                 std::span<const double> x, std::span<double> out,
                                 Workspace& base, const DropoutMask& dropout) const {
  auto& ws = static_cast<TransformerWorkspace&>(base);
  const std::size_t L = spec_.lookback, d = spec_.hidden, C = spec_.input_features;
  const std::size_t heads = spec_.heads, dh = d / heads, ff = d * kFfnExpansion;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double* p = params.data();

  // Embedding + positional encoding into the first layer's input (or e_out).
  double* e = layers_.empty() ? ws.e_out.data() : ws.layers[0].e_in.data();
  k::affine_rows(p + embed_w_, p + embed_b_, x.data(), e, L, d, C);
  for (std::size_t i = 0; i < L * d; ++i) e[i] += pe_[i];

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& s = layers_[l];
    auto& c = ws.layers[l];
    const double* ein = c.e_in.data();

    for (std::size_t t = 0; t < L; ++t)
      k::layer_norm(ein + t * d, p + s.ln1_g, p + s.ln1_b, c.a.data() + t * d,
                    c.xhat1.data() + t * d, &c.rstd1[t], d);
    k::affine_rows(p + s.wq, p + s.bq, c.a.data(), c.q.data(), L, d, d);
    k::affine_rows(p + s.wk, p + s.bk, c.a.data(), c.kk.data(), L, d, d);
    k::affine_rows(p + s.wv, p + s.bv, c.a.data(), c.v.data(), L, d, d);

    std::fill(c.attn.begin(), c.attn.end(), 0.0);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      for (std::size_t t = 0; t < L; ++t) {
        double* pr = c.probs.data() + (h * L + t) * L;
        double mx = -INFINITY;
        for (std::size_t u = 0; u < L; ++u) {
          pr[u] = scale * k::dot(c.q.data() + t * d + off, c.kk.data() + u * d + off, dh);
          mx = std::max(mx, pr[u]);
        }
        double sum = 0.0;
        for (std::size_t u = 0; u < L; ++u) {
          pr[u] = std::exp(pr[u] - mx);
          sum += pr[u];
        }
        const double inv = 1.0 / sum;
        double* o = c.attn.data() + t * d + off;
        for (std::size_t u = 0; u < L; ++u) {
          pr[u] *= inv;
          k::axpy(pr[u], c.v.data() + u * d + off, o, dh);
        }
      }
    }
    k::affine_rows(p + s.wo, p + s.bo, c.attn.data(), ws.tmp.data(), L, d, d);
    for (std::size_t t = 0; t < L; ++t)
      for (std::size_t j = 0; j < d; ++j)
        c.e_mid[t * d + j] =
            ein[t * d + j] +
            ws.tmp[t * d + j] * dropout.factor(site(l, kAttnOut, t, j, L, d));

    for (std::size_t t = 0; t < L; ++t)
      k::layer_norm(c.e_mid.data() + t * d, p + s.ln2_g, p + s.ln2_b,
                    c.b.data() + t * d, c.xhat2.data() + t * d, &c.rstd2[t], d);
    k::affine_rows(p + s.w1, p + s.b1, c.b.data(), c.f1.data(), L, ff, d);
    for (std::size_t i = 0; i < L * ff; ++i) c.gact[i] = k::gelu(c.f1[i]);
    k::affine_rows(p + s.w2, p + s.b2, c.gact.data(), ws.tmp.data(), L, d, ff);

    double* next = l + 1 < layers_.size() ? ws.layers[l + 1].e_in.data() : ws.e_out.data();
    for (std::size_t t = 0; t < L; ++t)
      for (std::size_t j = 0; j < d; ++j)
        next[t * d + j] =
            c.e_mid[t * d + j] +
            ws.tmp[t * d + j] * dropout.factor(site(l, kFfnOut, t, j, L, d));
  }

  k::layer_norm(ws.e_out.data() + (L - 1) * d, p + lnf_g_, p + lnf_b_, ws.z.data(),
                ws.xhat_f.data(), &ws.rstd_f, d);
  k::affine(p + head_w_, p + head_b_, ws.z.data(), out.data(), spec_.horizon, d);
}

void TransformerNetwork::backward(std::span<const double> params,
                                  std::span<const double> x,
                                  std::span<const double> dout, std::span<double> grad,
                                  Workspace& base, const DropoutMask& dropout) const {
  auto& ws = static_cast<TransformerWorkspace&>(base);
  const std::size_t L = spec_.lookback, d = spec_.hidden, C = spec_.input_features;
  const std::size_t heads = spec_.heads, dh = d / heads, ff = d * kFfnExpansion;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double* p = params.data();
  double* g = grad.data();

  // Head and final LN, only the last token carries gradient.
  std::fill(ws.dz.begin(), ws.dz.end(), 0.0);
  k::outer_acc(dout.data(), ws.z.data(), g + head_w_, spec_.horizon, d);
  k::axpy(1.0, dout.data(), g + head_b_, spec_.horizon);
  k::matvec_t_acc(p + head_w_, dout.data(), ws.dz.data(), spec_.horizon, d);
  std::fill(ws.de.begin(), ws.de.end(), 0.0);
  k::layer_norm_backward(ws.dz.data(), ws.xhat_f.data(), ws.rstd_f, p + lnf_g_,
                         ws.de.data() + (L - 1) * d, g + lnf_g_, g + lnf_b_, d);

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& s = layers_[li];
    auto& c = ws.layers[li];

    // FFN block: e_out = e_mid + drop(W2 gelu(W1 LN2(e_mid) + b1) + b2).
    for (std::size_t t = 0; t < L; ++t)
      for (std::size_t j = 0; j < d; ++j)
        ws.dtmp[t * d + j] =
            ws.de[t * d + j] * dropout.factor(site(li, kFfnOut, t, j, L, d));
    std::fill(ws.dg.begin(), ws.dg.end(), 0.0);
    k::affine_rows_backward(p + s.w2, c.gact.data(), ws.dtmp.data(), g + s.w2,
                            g + s.b2, ws.dg.data(), L, d, ff);
    for (std::size_t i = 0; i < L * ff; ++i) ws.df1[i] = ws.dg[i] * k::gelu_grad(c.f1[i]);
    std::fill(ws.db.begin(), ws.db.end(), 0.0);
    k::affine_rows_backward(p + s.w1, c.b.data(), ws.df1.data(), g + s.w1, g + s.b1,
                            ws.db.data(), L, ff, d);
    for (std::size_t t = 0; t < L; ++t)
      k::layer_norm_backward(ws.db.data() + t * d, c.xhat2.data() + t * d, c.rstd2[t],
                             p + s.ln2_g, ws.de.data() + t * d, g + s.ln2_g,
                             g + s.ln2_b, d);

    // Attention block: e_mid = e_in + drop(Wo attn + bo).
    for (std::size_t t = 0; t < L; ++t)
      for (std::size_t j = 0; j < d; ++j)
        ws.dtmp[t * d + j] =
            ws.de[t * d + j] * dropout.factor(site(li, kAttnOut, t, j, L, d));
    std::fill(ws.datt.begin(), ws.datt.end(), 0.0);
    k::affine_rows_backward(p + s.wo, c.attn.data(), ws.dtmp.data(), g + s.wo,
                            g + s.bo, ws.datt.data(), L, d, d);

    std::fill(ws.dq.begin(), ws.dq.end(), 0.0);
    std::fill(ws.dk.begin(), ws.dk.end(), 0.0);
    std::fill(ws.dv.begin(), ws.dv.end(), 0.0);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      for (std::size_t t = 0; t < L; ++t) {
        const double* pr = c.probs.data() + (h * L + t) * L;
        const double* dout_t = ws.datt.data() + t * d + off;
        double weighted = 0.0;
        for (std::size_t u = 0; u < L; ++u) {
          ws.dprob[u] = k::dot(dout_t, c.v.data() + u * d + off, dh);
          weighted += pr[u] * ws.dprob[u];
          k::axpy(pr[u], dout_t, ws.dv.data() + u * d + off, dh);
        }
        for (std::size_t u = 0; u < L; ++u) {
          const double ds = pr[u] * (ws.dprob[u] - weighted) * scale;
          k::axpy(ds, c.kk.data() + u * d + off, ws.dq.data() + t * d + off, dh);
          k::axpy(ds, c.q.data() + t * d + off, ws.dk.data() + u * d + off, dh);
        }
      }
    }
    std::fill(ws.da.begin(), ws.da.end(), 0.0);
    k::affine_rows_backward(p + s.wq, c.a.data(), ws.dq.data(), g + s.wq, g + s.bq,
                            ws.da.data(), L, d, d);
    k::affine_rows_backward(p + s.wk, c.a.data(), ws.dk.data(), g + s.wk, g + s.bk,
                            ws.da.data(), L, d, d);
    k::affine_rows_backward(p + s.wv, c.a.data(), ws.dv.data(), g + s.wv, g + s.bv,
                            ws.da.data(), L, d, d);
    for (std::size_t t = 0; t < L; ++t)
      k::layer_norm_backward(ws.da.data() + t * d, c.xhat1.data() + t * d, c.rstd1[t],
                             p + s.ln1_g, ws.de.data() + t * d, g + s.ln1_g,
                             g + s.ln1_b, d);
  }

  k::affine_rows_backward(p + embed_w_, x.data(), ws.de.data(), g + embed_w_,
                          g + embed_b_, nullptr, L, d, C);
}

}  // namespace msgm::neural
