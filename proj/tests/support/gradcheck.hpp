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

// Shared helpers for the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "msgm/neural/batch_ops.hpp"
#include "msgm/neural/network.hpp"
#include "msgm/rng.hpp"
#include "msgm/splitting.hpp"

namespace msgm::testing_support {

// Standard-normal series with `cols` columns (target last).
inline std::shared_ptr<dataio::NormalizedSeries> random_series(const std::string& id,
                                                              std::size_t rows,
                                                              std::size_t cols,
                                                              std::uint64_t seed) {
  auto s = std::make_shared<dataio::NormalizedSeries>();
  s->building_id = id;
  for (std::size_t c = 0; c + 1 < cols; ++c) s->schema.feature_names.push_back("f" + std::to_string(c));
  s->schema.target_name = "y";
  s->rows = rows;
  s->cols = cols;
  Rng rng(seed);
  s->values.resize(rows * cols);
  for (double& v : s->values) v = rng.normal();
  return s;
}

struct GradCheckResult {
  double worst_rel = 0;
  std::string worst_slice;
  std::size_t checked = 0;
  std::size_t slices = 0;
};

// Relative error with an absolute floor: entries whose analytic and numeric
// values are both below `floor` compare on an absolute scale.
inline double grad_rel_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Central-difference check of loss_and_grad_serial over every entry of every
// parameter slice (or at most `per_slice` evenly spaced entries per slice).
inline GradCheckResult grad_check(const neural::Network& net, std::uint64_t seed,
                                  std::size_t n_windows = 4, double dropout = 0.0,
                                  std::size_t per_slice = 0, double step = 1e-5) {
  const auto& spec = net.spec();
  const std::size_t rows = spec.lookback + spec.horizon + 3 * n_windows;
  auto series = random_series("gc", rows, spec.input_features, derive_seed(seed, {1}));
  const auto batch = splitting::make_windows(series, {0, rows}, 3, spec.lookback, spec.horizon);
  std::vector<std::size_t> idx(std::min(n_windows, batch.size()));
  std::iota(idx.begin(), idx.end(), 0);

  std::vector<double> p(net.param_count());
  net.init_params(p, derive_seed(seed, {2}));
  Rng rng(derive_seed(seed, {3}));
  // Move off the initialisation so no entry sits at an exact symmetry.
  for (double& x : p) x += 0.05 * rng.normal();

  const neural::DropoutSpec drop{dropout, derive_seed(seed, {4})};
  const auto ref = neural::loss_and_grad_serial(net, p, batch, idx, drop);

  GradCheckResult out;
  for (const auto& sl : net.layout().slices()) {
    ++out.slices;
    const std::size_t stride =
        per_slice == 0 ? 1 : std::max<std::size_t>(1, sl.size() / per_slice);
    for (std::size_t k = 0; k < sl.size(); k += stride) {
      const std::size_t i = sl.offset + k;
      const double orig = p[i];
      p[i] = orig + step;
      const double lp = neural::loss_and_grad_serial(net, p, batch, idx, drop).loss;
      p[i] = orig - step;
      const double lm = neural::loss_and_grad_serial(net, p, batch, idx, drop).loss;
      p[i] = orig;
      const double rel = grad_rel_error(ref.grad[i], (lp - lm) / (2 * step));
      ++out.checked;
      if (rel > out.worst_rel) {
        out.worst_rel = rel;
        out.worst_slice = sl.name + "[" + std::to_string(k) + "]";
      }
    }
  }
  return out;
}

}  // namespace msgm::testing_support
