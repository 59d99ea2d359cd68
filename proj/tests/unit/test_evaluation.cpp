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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../support/oracles.hpp"
#include "msgm/error.hpp"
#include "msgm/evaluation.hpp"
#include "msgm/rng.hpp"

namespace msgm::evaluation {
namespace {

namespace fs = std::filesystem;

CelsiusBlock block(const std::vector<std::vector<double>>& rows) {
  CelsiusBlock b(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) b.at(i, j) = rows[i][j];
  return b;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EvalReport report_of(const std::string& label, const std::vector<std::pair<std::string, double>>& maes) {
  std::vector<BuildingReport> b;
  for (const auto& [id, m] : maes) b.push_back(all_in_one_report(id, {m, m * 1.2, 10}));
  return make_eval_report(label, EvalMode::kAllInOne, b);
}

TEST(Metrics, HandCase) {
  const auto truth = block({{1, -1, 2, 0}});
  const auto pred = block({{0, 0, 0, 0}});
  EXPECT_DOUBLE_EQ(mae(truth, pred), 1.0);
  EXPECT_DOUBLE_EQ(rmse(truth, pred), std::sqrt(1.5));
  EXPECT_EQ(metrics(truth, pred).n_windows, 1u);
}

TEST(Metrics, MatchBruteForceOnRandomArrays) {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(64);
    std::vector<std::vector<double>> t(n, std::vector<double>(4)), p = t;
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < 4; ++j) {
        t[i][j] = rng.uniform(-10, 30);
        p[i][j] = t[i][j] + rng.normal() * 2;
      }
    const double m = mae(block(t), block(p)), r = rmse(block(t), block(p));
    ASSERT_NEAR(m, testing_support::brute_mae(t, p), 1e-9);
    ASSERT_NEAR(r, testing_support::brute_rmse(t, p), 1e-9);
    ASSERT_GE(r, m);
  }
}

TEST(Metrics, Rejections) {
  EXPECT_THROW(mae(block({{1, 2}}), block({{1, 2, 3}})), ShapeError);
  EXPECT_THROW(rmse(CelsiusBlock(), CelsiusBlock()), EmptyBatch);
  EXPECT_THROW(mae(block({{NAN}}), block({{0}})), InvalidArgument);
}

TEST(Reports, SeasonalOverallIsUnweightedMean) {
  const auto r = seasonal_report("b", {{{1, 2, 10}, {2, 3, 20}, {3, 4, 30}, {6, 7, 40}}});
  EXPECT_DOUBLE_EQ(r.overall.mae, 3.0);
  EXPECT_DOUBLE_EQ(r.overall.rmse, 4.0);
  EXPECT_EQ(r.overall.n_windows, 100u);
  EXPECT_EQ(r.seasons.size(), 4u);
}

TEST(Summary, QuartilesByLinearInterpolation) {
  const auto s = summarize({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(s.q1, 1.75);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.q3, 3.25);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 4.0);
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(summarize({7}).q3, 7.0);
  EXPECT_THROW(summarize({}), InvalidArgument);
  EXPECT_THROW(aggregate({}), InvalidArgument);
}

TEST(Compare, CountsAndImprovement) {
  const auto a = report_of("msgm", {{"x", 1.0}, {"y", 2.0}, {"z", 3.0}});
  const auto b = report_of("single", {{"z", 3.0}, {"x", 2.0}, {"y", 4.0}});
  const auto c = compare(a, b);
  EXPECT_EQ(c.wins, 2u);
  EXPECT_EQ(c.losses, 0u);
  EXPECT_EQ(c.ties, 1u);
  EXPECT_DOUBLE_EQ(c.win_fraction, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.improvement_mae, (3.0 - 2.0) / 3.0);
  ASSERT_EQ(c.rows.size(), 3u);
  EXPECT_EQ(c.rows[0].building_id, "x");
  EXPECT_EQ(c.rows[0].b.mae, 2.0);
  EXPECT_THROW(compare(a, report_of("o", {{"x", 1.0}})), InvalidArgument);
}

TEST(Spearman, KnownValues) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  // Ties receive average ranks: x ranks 1,2,3.5,3.5 and y ranks 1,2,3,4.
  const double rho = spearman({1, 2, 3, 3}, {1, 2, 3, 4});
  const double mx = 2.5, my = 2.5;
  const double xs[] = {1, 2, 3.5, 3.5}, ys[] = {1, 2, 3, 4};
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < 4; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  EXPECT_NEAR(rho, sxy / std::sqrt(sxx * syy), 1e-12);
}

TEST(Ablation, FinalizeSortsAndCorrelates) {
  AblationReport r;
  r.label = "abl";
  for (std::size_t n : {8, 1, 4, 2}) {
    AblationRow row;
    row.n_sources = n;
    row.best = {1.0 / static_cast<double>(n), 1.5 / static_cast<double>(n), 5};
    row.run_maes = {row.best.mae};
    r.rows.push_back(row);
  }
  finalize(r);
  EXPECT_EQ(r.rows.front().n_sources, 1u);
  EXPECT_EQ(r.rows.back().n_sources, 8u);
  EXPECT_DOUBLE_EQ(r.spearman_log2n_mae, -1.0);
  const auto back = ablation_report_from_json(to_json(r));
  EXPECT_EQ(back.rows.size(), 4u);
  EXPECT_DOUBLE_EQ(back.spearman_log2n_mae, -1.0);
}

TEST(Json, EvalReportRoundTrip) {
  std::vector<BuildingReport> b{
      seasonal_report("b2", {{{1, 2, 3}, {2, 3, 4}, {3, 4, 5}, {4, 5, 6}}}),
      seasonal_report("b1", {{{0.5, 0.7, 1}, {0.5, 0.7, 1}, {0.5, 0.7, 1}, {0.5, 0.7, 1}}})};
  const auto r = make_eval_report("lbl", EvalMode::kSeasonal, b, {{"k", 1}});
  EXPECT_EQ(r.buildings.front().building_id, "b1");
  const auto path = fs::path(testing::TempDir()) / "msgm_eval.json";
  write_json(path, to_json(r));
  const auto back = eval_report_from_json(read_json(path));
  EXPECT_EQ(back.buildings, r.buildings);
  EXPECT_EQ(back.summary, r.summary);
  EXPECT_EQ(back.label, "lbl");
  EXPECT_EQ(back.mode, EvalMode::kSeasonal);
  EXPECT_EQ(eval_mode_from_string("all_in_one"), EvalMode::kAllInOne);
  EXPECT_THROW(eval_mode_from_string("monthly"), InvalidArgument);
}

TEST(Plots, DeterministicCsvAndSvg) {
  const auto c = compare(report_of("a", {{"x", 1.0}, {"y", 2.0}}),
                         report_of("b", {{"x", 1.5}, {"y", 1.0}}));
  const fs::path dir = fs::path(testing::TempDir()) / "msgm_plots";
  fs::create_directories(dir);
  const auto p1 = emit_scatter(c, dir / "s1");
  const auto p2 = emit_scatter(c, dir / "s2");
  ASSERT_EQ(p1.size(), 2u);
  EXPECT_EQ(slurp(p1[0]), slurp(p2[0]));
  EXPECT_EQ(slurp(p1[1]), slurp(p2[1]));
  const auto csv = slurp(p1[0]);
  EXPECT_EQ(csv.rfind("x,y,series,label\n", 0), 0u);
  EXPECT_NE(slurp(p1[1]).find("<svg"), std::string::npos);

  const auto box = emit_boxplot({report_of("a", {{"x", 1.0}, {"y", 2.0}})}, dir / "box");
  EXPECT_EQ(box.size(), 2u);
  AblationReport r;
  r.label = "abl";
  for (std::size_t n : {1, 2, 4}) {
    AblationRow row;
    row.n_sources = n;
    row.best = {2.0 / n, 3.0 / n, 1};
    r.rows.push_back(row);
  }
  finalize(r);
  const auto curve = emit_ablation_curve(r, dir / "curve");
  EXPECT_NE(slurp(curve[0]).find("\n2,"), std::string::npos);
}

}  // namespace
}  // namespace msgm::evaluation
