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

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "msgm/units.hpp"
#include "nlohmann/json.hpp"

namespace msgm::evaluation {

inline constexpr int kReportVersion = 1;

// Mean absolute error and root mean squared error over all n*h entries, in
// kelvin. Throw ShapeError on mismatched shapes and EmptyBatch on empty input.
double mae(const CelsiusBlock& truth, const CelsiusBlock& pred);
double rmse(const CelsiusBlock& truth, const CelsiusBlock& pred);

struct MetricPair {
  double mae = 0;
  double rmse = 0;
  std::size_t n_windows = 0;

  bool operator==(const MetricPair&) const = default;
};

MetricPair metrics(const CelsiusBlock& truth, const CelsiusBlock& pred);

enum class EvalMode { kSeasonal, kAllInOne };

std::string to_string(EvalMode mode);
// Accepts "seasonal", "all-in-one" and "all_in_one".
EvalMode eval_mode_from_string(std::string_view name);

struct BuildingReport {
  std::string building_id;
  EvalMode mode = EvalMode::kAllInOne;
  std::vector<MetricPair> seasons;  // four entries in seasonal mode
  MetricPair overall;

  bool operator==(const BuildingReport&) const = default;
};

// Overall = unweighted mean of the four seasonal values per metric;
// n_windows is the total.
BuildingReport seasonal_report(std::string building_id,
                               const std::array<MetricPair, 4>& seasons);
BuildingReport all_in_one_report(std::string building_id, MetricPair overall);

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0;
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  double min = 0;
  double max = 0;

  bool operator==(const SummaryStats&) const = default;
};

// Quantile of sorted values by linear interpolation between closest ranks,
// position q * (n - 1).
double quantile_sorted(const std::vector<double>& sorted, double q);
SummaryStats summarize(std::vector<double> values);

struct Summary {
  SummaryStats mae;
  SummaryStats rmse;

  bool operator==(const Summary&) const = default;
};

// Throws InvalidArgument on an empty list.
Summary aggregate(const std::vector<BuildingReport>& reports);

struct EvalReport {
  std::string label;
  EvalMode mode = EvalMode::kAllInOne;
  std::vector<BuildingReport> buildings;  // sorted by building id
  Summary summary;
  nlohmann::json config = nlohmann::json::object();
};

EvalReport make_eval_report(std::string label, EvalMode mode,
                            std::vector<BuildingReport> buildings,
                            nlohmann::json config = nlohmann::json::object());

struct ComparisonRow {
  std::string building_id;
  MetricPair a;
  MetricPair b;
};

struct ComparisonReport {
  std::string label_a;
  std::string label_b;
  std::vector<ComparisonRow> rows;  // sorted by building id
  std::size_t wins = 0;             // A's MAE strictly lower
  std::size_t losses = 0;
  std::size_t ties = 0;
  double win_fraction = 0;          // wins / rows
  double improvement_mae = 0;       // (mean_B - mean_A) / mean_B
  double improvement_rmse = 0;
  Summary summary_a;
  Summary summary_b;
  nlohmann::json config = nlohmann::json::object();
};

// Throws InvalidArgument when the two reports cover different buildings.
ComparisonReport compare(const EvalReport& a, const EvalReport& b);

struct AblationRow {
  std::size_t n_sources = 0;
  MetricPair best;                 // mean target MAE/RMSE of the kept run
  std::vector<double> run_maes;    // one per repeat
  std::size_t best_run = 0;
  std::vector<std::string> sources;  // source ids of the kept run
  SummaryStats target_mae;          // across targets, kept run
};

struct AblationReport {
  std::string label;
  std::vector<AblationRow> rows;  // ascending n
  double spearman_log2n_mae = 0;
  std::vector<std::string> target_ids;
  nlohmann::json config = nlohmann::json::object();
};

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);
void finalize(AblationReport& report);

nlohmann::json to_json(const MetricPair& m);
MetricPair metric_pair_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SummaryStats& s);
nlohmann::json to_json(const BuildingReport& r);
BuildingReport building_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const AblationReport& r);
AblationReport ablation_report_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Each writes `<stem>.csv` (header x,y,series,label) and `<stem>.svg` and
// returns both paths. Output is byte-deterministic.
std::vector<std::filesystem::path> emit_scatter(const ComparisonReport& report,
                                                const std::filesystem::path& stem);
std::vector<std::filesystem::path> emit_boxplot(const std::vector<EvalReport>& reports,
                                                const std::filesystem::path& stem);
std::vector<std::filesystem::path> emit_ablation_curve(const AblationReport& report,
                                                       const std::filesystem::path& stem);

}  // namespace msgm::evaluation
