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

#include "msgm/neural/batch_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msgm/error.hpp"

namespace msgm::neural {

using splitting::WindowBatch;

DropoutMask DropoutSpec::mask_for(std::size_t position) const {
  return DropoutMask{rate, derive_seed(seed, {position})};
}

void check_batch(const Network& net, const WindowBatch& batch) {
  const auto& s = net.spec();
  if (batch.empty()) return;
  if (batch.lookback() != s.lookback || batch.horizon() != s.horizon ||
      batch.channels() != s.input_features)
    throw ShapeError("batch shape [L=" + std::to_string(batch.lookback()) +
                     ", C=" + std::to_string(batch.channels()) +
                     ", H=" + std::to_string(batch.horizon()) +
                     "] does not match model [L=" + std::to_string(s.lookback) +
                     ", C=" + std::to_string(s.input_features) +
                     ", H=" + std::to_string(s.horizon) + "]");
}

NormalizedBlock forward_batch(const Network& net, std::span<const double> params,
                              const WindowBatch& batch) {
  check_batch(net, batch);
  const std::size_t n = batch.size(), h = net.spec().horizon;
  NormalizedBlock out(n, h);
#pragma omp parallel
  {
    auto ws = net.make_workspace();
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i)
      net.forward(params, batch.input(i), out.row(i), *ws, DropoutMask{});
  }
  return out;
}

NormalizedBlock forward_batch_serial(const Network& net,
                                     std::span<const double> params,
                                     const WindowBatch& batch) {
  check_batch(net, batch);
  const std::size_t n = batch.size(), h = net.spec().horizon;
  NormalizedBlock out(n, h);
  auto ws = net.make_workspace();
  for (std::size_t i = 0; i < n; ++i)
    net.forward(params, batch.input(i), out.row(i), *ws, DropoutMask{});
  return out;
}

NormalizedBlock batch_targets(const WindowBatch& batch) {
  NormalizedBlock out(batch.size(), batch.horizon());
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (std::size_t j = 0; j < batch.horizon(); ++j) out.at(i, j) = batch.target(i, j);
  return out;
}

namespace {

// Squared error of one example, adding its gradient into `grad`.
double example_loss_grad(const Network& net, std::span<const double> params,
                         const WindowBatch& batch, std::size_t i, double scale,
                         const DropoutMask& mask, std::span<double> grad,
                         Workspace& ws, std::vector<double>& pred,
                         std::vector<double>& dout) {
  net.forward(params, batch.input(i), pred, ws, mask);
  double sq = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    const double e = pred[j] - batch.target(i, j);
    sq += e * e;
    dout[j] = 2.0 * e * scale;
  }
  net.backward(params, batch.input(i), dout, grad, ws, mask);
  return sq;
}

void check_loss_inputs(const Network& net, std::span<const double> params,
                       const WindowBatch& batch, std::span<const std::size_t> indices) {
  if (indices.empty()) throw EmptyBatch("loss_and_grad: empty batch");
  check_batch(net, batch);
  if (params.size() != net.param_count())
    throw ShapeError("parameter vector has " + std::to_string(params.size()) +
                     " entries, model expects " + std::to_string(net.param_count()));
}

}  // namespace

LossGrad loss_and_grad(const Network& net, std::span<const double> params,
                       const WindowBatch& batch, std::span<const std::size_t> indices,
                       const DropoutSpec& dropout) {
  check_loss_inputs(net, params, batch, indices);
  const std::size_t n = indices.size(), h = net.spec().horizon, P = params.size();
  const double scale = 1.0 / static_cast<double>(n * h);
  const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;

  std::vector<double> chunk_grad(chunks * P, 0.0);
  std::vector<double> chunk_sq(chunks, 0.0);

#pragma omp parallel
  {
    auto ws = net.make_workspace();
    std::vector<double> pred(h), dout(h);
#pragma omp for schedule(static)
    for (std::size_t c = 0; c < chunks; ++c) {
      std::span<double> g(chunk_grad.data() + c * P, P);
      const std::size_t end = std::min(n, (c + 1) * kReduceChunk);
      double sq = 0.0;
      for (std::size_t p = c * kReduceChunk; p < end; ++p)
        sq += example_loss_grad(net, params, batch, indices[p], scale,
                                dropout.mask_for(p), g, *ws, pred, dout);
      chunk_sq[c] = sq;
    }
  }

  LossGrad out;
  out.grad.assign(P, 0.0);
  double sq = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sq += chunk_sq[c];
    const double* g = chunk_grad.data() + c * P;
    for (std::size_t k = 0; k < P; ++k) out.grad[k] += g[k];
  }
  out.loss = sq * scale;
  return out;
}

LossGrad loss_and_grad_serial(const Network& net, std::span<const double> params,
                              const WindowBatch& batch,
                              std::span<const std::size_t> indices,
                              const DropoutSpec& dropout) {
  check_loss_inputs(net, params, batch, indices);
  const std::size_t n = indices.size(), h = net.spec().horizon;
  const double scale = 1.0 / static_cast<double>(n * h);
  auto ws = net.make_workspace();
  std::vector<double> pred(h), dout(h);
  LossGrad out;
  out.grad.assign(params.size(), 0.0);
  double sq = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    sq += example_loss_grad(net, params, batch, indices[p], scale, dropout.mask_for(p),
                            out.grad, *ws, pred, dout);
  out.loss = sq * scale;
  return out;
}

LossGrad loss_and_grad(const Network& net, std::span<const double> params,
                       const WindowBatch& batch, const DropoutSpec& dropout) {
  std::vector<std::size_t> all(batch.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return loss_and_grad(net, params, batch, all, dropout);
}

double normalized_rmse(const Network& net, std::span<const double> params,
                       const WindowBatch& batch) {
  if (batch.empty()) throw EmptyBatch("normalized_rmse: empty batch");
  const NormalizedBlock pred = forward_batch(net, params, batch);
  double sq = 0.0;
  for (std::size_t i = 0; i < pred.n; ++i)
    for (std::size_t j = 0; j < pred.h; ++j) {
      const double e = pred.at(i, j) - batch.target(i, j);
      sq += e * e;
    }
  return std::sqrt(sq / static_cast<double>(pred.n * pred.h));
}

}  // namespace msgm::neural
