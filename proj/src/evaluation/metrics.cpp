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
#include <numeric>

#include "msgm/error.hpp"
#include "msgm/evaluation.hpp"

namespace msgm::evaluation {

namespace {

void check_blocks(const CelsiusBlock& truth, const CelsiusBlock& pred) {
  if (truth.n != pred.n || truth.h != pred.h ||
      truth.values.size() != truth.n * truth.h || pred.values.size() != pred.n * pred.h)
    throw ShapeError("metrics: truth [" + std::to_string(truth.n) + " x " +
                     std::to_string(truth.h) + "] vs prediction [" +
                     std::to_string(pred.n) + " x " + std::to_string(pred.h) + "]");
  if (truth.values.empty()) throw EmptyBatch("metrics: empty input");
}

double check_finite(double e) {
  if (!std::isfinite(e)) throw InvalidArgument("metrics: non-finite value");
  return e;
}

}  // namespace

double mae(const CelsiusBlock& truth, const CelsiusBlock& pred) {
  check_blocks(truth, pred);
  double acc = 0.0;
  for (std::size_t k = 0; k < truth.values.size(); ++k)
    acc += std::abs(check_finite(truth.values[k] - pred.values[k]));
  return acc / static_cast<double>(truth.values.size());
}

double rmse(const CelsiusBlock& truth, const CelsiusBlock& pred) {
  check_blocks(truth, pred);
  double acc = 0.0;
  for (std::size_t k = 0; k < truth.values.size(); ++k) {
    const double e = check_finite(truth.values[k] - pred.values[k]);
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(truth.values.size()));
}

MetricPair metrics(const CelsiusBlock& truth, const CelsiusBlock& pred) {
  return {mae(truth, pred), rmse(truth, pred), truth.n};
}

std::string to_string(EvalMode mode) {
  return mode == EvalMode::kSeasonal ? "seasonal" : "all-in-one";
}

EvalMode eval_mode_from_string(std::string_view name) {
  if (name == "seasonal") return EvalMode::kSeasonal;
  if (name == "all-in-one" || name == "all_in_one") return EvalMode::kAllInOne;
  throw InvalidArgument("unknown evaluation mode '" + std::string(name) + "'");
}

BuildingReport seasonal_report(std::string building_id,
                               const std::array<MetricPair, 4>& seasons) {
  BuildingReport r;
  r.building_id = std::move(building_id);
  r.mode = EvalMode::kSeasonal;
  r.seasons.assign(seasons.begin(), seasons.end());
  double m = 0.0, s = 0.0;
  for (const auto& p : seasons) {
    m += p.mae;
    s += p.rmse;
    r.overall.n_windows += p.n_windows;
  }
  r.overall.mae = m / 4.0;
  r.overall.rmse = s / 4.0;
  return r;
}

BuildingReport all_in_one_report(std::string building_id, MetricPair overall) {
  BuildingReport r;
  r.building_id = std::move(building_id);
  r.mode = EvalMode::kAllInOne;
  r.overall = overall;
  return r;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty list");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SummaryStats summarize(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("summarize: empty list");
  std::sort(values.begin(), values.end());
  SummaryStats s;
  s.count = values.size();
  // Sorted order makes the sum independent of input order.
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  s.median = quantile_sorted(values, 0.5);
  s.q1 = quantile_sorted(values, 0.25);
  s.q3 = quantile_sorted(values, 0.75);
  s.min = values.front();
  s.max = values.back();
  return s;
}

Summary aggregate(const std::vector<BuildingReport>& reports) {
  if (reports.empty()) throw InvalidArgument("aggregate: no reports");
  std::vector<double> m, r;
  for (const auto& b : reports) {
    m.push_back(b.overall.mae);
    r.push_back(b.overall.rmse);
  }
  return {summarize(std::move(m)), summarize(std::move(r))};
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidArgument("spearman: need two equal-length lists of >= 2 values");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace msgm::evaluation
