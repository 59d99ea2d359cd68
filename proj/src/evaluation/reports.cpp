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
#include <fstream>
#include <set>

#include "msgm/error.hpp"
#include "msgm/evaluation.hpp"

namespace msgm::evaluation {

using nlohmann::json;

EvalReport make_eval_report(std::string label, EvalMode mode,
                            std::vector<BuildingReport> buildings, json config) {
  std::sort(buildings.begin(), buildings.end(),
            [](const auto& a, const auto& b) { return a.building_id < b.building_id; });
  EvalReport r;
  r.label = std::move(label);
  r.mode = mode;
  r.summary = aggregate(buildings);
  r.buildings = std::move(buildings);
  r.config = std::move(config);
  return r;
}

ComparisonReport compare(const EvalReport& a, const EvalReport& b) {
  std::set<std::string> ids_a, ids_b;
  for (const auto& r : a.buildings) ids_a.insert(r.building_id);
  for (const auto& r : b.buildings) ids_b.insert(r.building_id);
  if (ids_a != ids_b || ids_a.size() != a.buildings.size() ||
      ids_b.size() != b.buildings.size())
    throw InvalidArgument("compare: reports '" + a.label + "' and '" + b.label +
                          "' cover different buildings");
  if (ids_a.empty()) throw InvalidArgument("compare: empty reports");

  ComparisonReport c;
  c.label_a = a.label;
  c.label_b = b.label;
  for (const auto& ra : a.buildings) {
    const auto it = std::find_if(b.buildings.begin(), b.buildings.end(), [&](const auto& x) {
      return x.building_id == ra.building_id;
    });
    c.rows.push_back({ra.building_id, ra.overall, it->overall});
  }
  std::sort(c.rows.begin(), c.rows.end(),
            [](const auto& x, const auto& y) { return x.building_id < y.building_id; });
  std::vector<BuildingReport> sa, sb;
  for (const auto& row : c.rows) {
    if (row.a.mae < row.b.mae) ++c.wins;
    else if (row.a.mae > row.b.mae) ++c.losses;
    else ++c.ties;
    sa.push_back(all_in_one_report(row.building_id, row.a));
    sb.push_back(all_in_one_report(row.building_id, row.b));
  }
  c.win_fraction = static_cast<double>(c.wins) / static_cast<double>(c.rows.size());
  c.summary_a = aggregate(sa);
  c.summary_b = aggregate(sb);
  const auto rel = [](double ma, double mb) { return mb > 0 ? (mb - ma) / mb : 0.0; };
  c.improvement_mae = rel(c.summary_a.mae.mean, c.summary_b.mae.mean);
  c.improvement_rmse = rel(c.summary_a.rmse.mean, c.summary_b.rmse.mean);
  c.config = {{"a", a.config}, {"b", b.config}};
  return c;
}

void finalize(AblationReport& report) {
  std::sort(report.rows.begin(), report.rows.end(),
            [](const auto& x, const auto& y) { return x.n_sources < y.n_sources; });
  report.spearman_log2n_mae = 0.0;
  if (report.rows.size() < 2) return;
  std::vector<double> x, y;
  for (const auto& r : report.rows) {
    x.push_back(std::log2(static_cast<double>(r.n_sources)));
    y.push_back(r.best.mae);
  }
  report.spearman_log2n_mae = spearman(x, y);
}

json to_json(const MetricPair& m) {
  return {{"mae", m.mae}, {"rmse", m.rmse}, {"n_windows", m.n_windows}};
}

MetricPair metric_pair_from_json(const json& j) {
  return {j.at("mae").get<double>(), j.at("rmse").get<double>(),
          j.at("n_windows").get<std::size_t>()};
}

json to_json(const SummaryStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"q1", s.q1},
          {"q3", s.q3},       {"min", s.min},   {"max", s.max}};
}

json to_json(const BuildingReport& r) {
  json seasons = json::array();
  for (const auto& s : r.seasons) seasons.push_back(to_json(s));
  return {{"building_id", r.building_id},
          {"mode", to_string(r.mode)},
          {"seasons", seasons},
          {"overall", to_json(r.overall)}};
}

BuildingReport building_report_from_json(const json& j) {
  BuildingReport r;
  r.building_id = j.at("building_id").get<std::string>();
  r.mode = eval_mode_from_string(j.at("mode").get<std::string>());
  for (const auto& s : j.at("seasons")) r.seasons.push_back(metric_pair_from_json(s));
  r.overall = metric_pair_from_json(j.at("overall"));
  return r;
}

namespace {

json summary_json(const Summary& s) {
  return {{"mae", to_json(s.mae)}, {"rmse", to_json(s.rmse)}};
}

void check_version(const json& j, std::string_view kind) {
  if (j.value("kind", std::string{}) != kind)
    throw DataError(DataErrorKind::kMalformed,
                    "report: expected kind '" + std::string(kind) + "'");
  if (j.value("report_version", 0) != kReportVersion)
    throw DataError(DataErrorKind::kMalformed, "report: unsupported report_version");
}

}  // namespace

json to_json(const EvalReport& r) {
  json b = json::array();
  for (const auto& x : r.buildings) b.push_back(to_json(x));
  return {{"kind", "eval"},
          {"report_version", kReportVersion},
          {"label", r.label},
          {"mode", to_string(r.mode)},
          {"buildings", b},
          {"summary", summary_json(r.summary)},
          {"config", r.config}};
}

EvalReport eval_report_from_json(const json& j) {
  try {
    check_version(j, "eval");
    std::vector<BuildingReport> b;
    for (const auto& x : j.at("buildings")) b.push_back(building_report_from_json(x));
    return make_eval_report(j.at("label").get<std::string>(),
                            eval_mode_from_string(j.at("mode").get<std::string>()),
                            std::move(b), j.value("config", json::object()));
  } catch (const json::exception& e) {
    throw DataError(DataErrorKind::kMalformed, std::string("eval report: ") + e.what());
  }
}

json to_json(const ComparisonReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"building_id", x.building_id}, {"a", to_json(x.a)}, {"b", to_json(x.b)}});
  return {{"kind", "comparison"},
          {"report_version", kReportVersion},
          {"label_a", r.label_a},
          {"label_b", r.label_b},
          {"rows", rows},
          {"wins", r.wins},
          {"losses", r.losses},
          {"ties", r.ties},
          {"win_fraction", r.win_fraction},
          {"improvement_mae", r.improvement_mae},
          {"improvement_rmse", r.improvement_rmse},
          {"summary_a", summary_json(r.summary_a)},
          {"summary_b", summary_json(r.summary_b)},
          {"config", r.config}};
}

json to_json(const AblationReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"n_sources", x.n_sources},
                    {"best", to_json(x.best)},
                    {"run_maes", x.run_maes},
                    {"best_run", x.best_run},
                    {"sources", x.sources},
                    {"target_mae", to_json(x.target_mae)}});
  return {{"kind", "ablation"},
          {"report_version", kReportVersion},
          {"label", r.label},
          {"rows", rows},
          {"spearman_log2n_mae", r.spearman_log2n_mae},
          {"target_ids", r.target_ids},
          {"config", r.config}};
}

AblationReport ablation_report_from_json(const json& j) {
  try {
    check_version(j, "ablation");
    AblationReport r;
    r.label = j.at("label").get<std::string>();
    r.target_ids = j.at("target_ids").get<std::vector<std::string>>();
    r.config = j.value("config", json::object());
    for (const auto& x : j.at("rows")) {
      AblationRow row;
      row.n_sources = x.at("n_sources").get<std::size_t>();
      row.best = metric_pair_from_json(x.at("best"));
      row.run_maes = x.at("run_maes").get<std::vector<double>>();
      row.best_run = x.at("best_run").get<std::size_t>();
      row.sources = x.at("sources").get<std::vector<std::string>>();
      const auto& t = x.at("target_mae");
      row.target_mae = {t.at("count").get<std::size_t>(), t.at("mean").get<double>(),
                        t.at("median").get<double>(),     t.at("q1").get<double>(),
                        t.at("q3").get<double>(),         t.at("min").get<double>(),
                        t.at("max").get<double>()};
      r.rows.push_back(std::move(row));
    }
    finalize(r);
    return r;
  } catch (const json::exception& e) {
    throw DataError(DataErrorKind::kMalformed, std::string("ablation report: ") + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(DataErrorKind::kMalformed, path.string() + ": " + e.what());
  }
}

}  // namespace msgm::evaluation
