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

#include "msgm/neural/kernels.hpp"

#include <numbers>

namespace msgm::neural::kernels {

void affine(const double* w, const double* b, const double* x, double* y,
            std::size_t out, std::size_t in) {
  for (std::size_t o = 0; o < out; ++o)
    y[o] = (b ? b[o] : 0.0) + dot(w + o * in, x, in);
}

void matvec_acc(const double* w, const double* x, double* y, std::size_t out,
                std::size_t in) {
  for (std::size_t o = 0; o < out; ++o) y[o] += dot(w + o * in, x, in);
}

void matvec_t_acc(const double* w, const double* dy, double* dx, std::size_t out,
                  std::size_t in) {
  for (std::size_t o = 0; o < out; ++o) axpy(dy[o], w + o * in, dx, in);
}

void outer_acc(const double* dy, const double* x, double* dw, std::size_t out,
               std::size_t in) {
  for (std::size_t o = 0; o < out; ++o) axpy(dy[o], x, dw + o * in, in);
}

void affine_rows(const double* w, const double* b, const double* x, double* y,
                 std::size_t rows, std::size_t out, std::size_t in) {
  for (std::size_t r = 0; r < rows; ++r) affine(w, b, x + r * in, y + r * out, out, in);
}

void affine_rows_backward(const double* w, const double* x, const double* dy,
                          double* dw, double* db, double* dx, std::size_t rows,
                          std::size_t out, std::size_t in) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* dyr = dy + r * out;
    outer_acc(dyr, x + r * in, dw, out, in);
    if (db) axpy(1.0, dyr, db, out);
    if (dx) matvec_t_acc(w, dyr, dx + r * in, out, in);
  }
}

void layer_norm(const double* x, const double* gamma, const double* beta, double* y,
                double* xhat, double* rstd, std::size_t n) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);
  const double r = 1.0 / std::sqrt(var + kLayerNormEps);
  *rstd = r;
  for (std::size_t i = 0; i < n; ++i) {
    xhat[i] = (x[i] - mean) * r;
    y[i] = gamma[i] * xhat[i] + beta[i];
  }
}

void layer_norm_backward(const double* dy, const double* xhat, double rstd,
                         const double* gamma, double* dx, double* dgamma,
                         double* dbeta, std::size_t n) {
  double mean_dxhat = 0.0;
  double mean_dxhat_xhat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dxh = dy[i] * gamma[i];
    mean_dxhat += dxh;
    mean_dxhat_xhat += dxh * xhat[i];
    dgamma[i] += dy[i] * xhat[i];
    dbeta[i] += dy[i];
  }
  mean_dxhat /= static_cast<double>(n);
  mean_dxhat_xhat /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dxh = dy[i] * gamma[i];
    dx[i] += rstd * (dxh - mean_dxhat - xhat[i] * mean_dxhat_xhat);
  }
}

namespace {
constexpr double kGeluK = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluC = 0.044715;
}  // namespace

double gelu(double x) {
  const double u = kGeluK * (x + kGeluC * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_grad(double x) {
  const double u = kGeluK * (x + kGeluC * x * x * x);
  const double t = std::tanh(u);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluK * (1.0 + 3.0 * kGeluC * x * x);
}

}  // namespace msgm::neural::kernels
