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

// Dense single-example building blocks. Matrices are row-major; W is
// [out x in]. Backward functions accumulate (+=) into their outputs.

#pragma once

#include <cmath>
#include <cstddef>

namespace msgm::neural::kernels {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

// y += alpha * x
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// y = W x + b (b may be null).
void affine(const double* w, const double* b, const double* x, double* y,
            std::size_t out, std::size_t in);

// y += W x
void matvec_acc(const double* w, const double* x, double* y, std::size_t out,
                std::size_t in);

// dx += W^T dy
void matvec_t_acc(const double* w, const double* dy, double* dx, std::size_t out,
                  std::size_t in);

// dW += dy x^T
void outer_acc(const double* dy, const double* x, double* dw, std::size_t out,
               std::size_t in);

// Row-wise affine over `rows` vectors: Y[r] = W X[r] + b.
void affine_rows(const double* w, const double* b, const double* x, double* y,
                 std::size_t rows, std::size_t out, std::size_t in);

// Backward of affine_rows. dx may be null.
void affine_rows_backward(const double* w, const double* x, const double* dy,
                          double* dw, double* db, double* dx, std::size_t rows,
                          std::size_t out, std::size_t in);

inline constexpr double kLayerNormEps = 1e-5;

// y = gamma * (x - mean) * rstd + beta for one vector; stores xhat and rstd.
void layer_norm(const double* x, const double* gamma, const double* beta, double* y,
                double* xhat, double* rstd, std::size_t n);

void layer_norm_backward(const double* dy, const double* xhat, double rstd,
                         const double* gamma, double* dx, double* dgamma,
                         double* dbeta, std::size_t n);

// tanh-approximation GELU and its derivative.
double gelu(double x);
double gelu_grad(double x);

}  // namespace msgm::neural::kernels
