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

#include "msgm/dataio.hpp"
#include "msgm/error.hpp"
#include "msgm/rng.hpp"
#include "nlohmann/json.hpp"

namespace msgm::dataio {

using nlohmann::json;

void FeatureSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& name : feature_names) {
    if (name.empty()) throw InvalidArgument("schema: empty feature name");
    if (!seen.insert(name).second)
      throw InvalidArgument("schema: duplicate feature name '" + name + "'");
  }
  if (target_name.empty()) throw InvalidArgument("schema: empty target name");
  if (seen.count(target_name))
    throw InvalidArgument("schema: target '" + target_name +
                          "' is also listed as a feature");
  if (step_minutes <= 0) throw InvalidArgument("schema: step_minutes must be > 0");
}

std::vector<std::string> FeatureSchema::columns() const {
  auto cols = feature_names;
  cols.push_back(target_name);
  return cols;
}

FeatureSchema FeatureSchema::with_step(int minutes) const {
  FeatureSchema s = *this;
  s.step_minutes = minutes;
  return s;
}

FeatureSchema FeatureSchema::building_default() {
  return {{"setpoint_c", "heating_power_w", "wind_ms", "t_out_c", "solar_wm2"},
          "t_in_c",
          15};
}

SeriesFrame::SeriesFrame(std::string building_id, std::string region,
                         FeatureSchema schema,
                         std::vector<UtcSeconds> timestamps,
                         std::vector<double> values)
    : building_id_(std::move(building_id)),
      region_(std::move(region)),
      schema_(std::move(schema)),
      timestamps_(std::move(timestamps)),
      values_(std::move(values)) {
  schema_.validate();
  const std::size_t c = schema_.n_columns();
  if (values_.size() != timestamps_.size() * c)
    throw ShapeError("frame '" + building_id_ + "': " +
                     std::to_string(values_.size()) + " values for " +
                     std::to_string(timestamps_.size()) + " rows x " +
                     std::to_string(c) + " columns");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw DataError(DataErrorKind::kNonFiniteValue,
                      "frame '" + building_id_ + "': non-finite value in row " +
                          std::to_string(i / c),
                      i / c);
  }
  for (std::size_t r = 1; r < timestamps_.size(); ++r) {
    if (timestamps_[r] <= timestamps_[r - 1])
      throw DataError(DataErrorKind::kNonMonotoneTimestamps,
                      "frame '" + building_id_ +
                          "': timestamps not strictly increasing at row " +
                          std::to_string(r),
                      r);
    const std::int64_t step = timestamps_[r] - timestamps_[r - 1];
    if (r == 1) {
      step_seconds_ = step;
    } else if (step != step_seconds_) {
      throw DataError(DataErrorKind::kIrregularStep,
                      "frame '" + building_id_ + "': step changes at row " +
                          std::to_string(r),
                      r);
    }
  }
  if (step_seconds_ > 0 && step_seconds_ != schema_.step_minutes * 60LL) {
    if (step_seconds_ % 60 != 0)
      throw DataError(DataErrorKind::kIrregularStep,
                      "frame '" + building_id_ + "': step is not whole minutes");
    schema_.step_minutes = static_cast<int>(step_seconds_ / 60);
  }
}

std::vector<double> SeriesFrame::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = value(r, c);
  return out;
}

const BuildingEntry& DatasetManifest::find(const std::string& id) const {
  for (const auto& b : buildings)
    if (b.id == id) return b;
  throw InvalidArgument("manifest: unknown building id '" + id + "'");
}

void write_manifest(const std::filesystem::path& path,
                    const DatasetManifest& manifest) {
  json j;
  j["buildings"] = json::array();
  for (const auto& b : manifest.buildings)
    j["buildings"].push_back({{"id", b.id}, {"region", b.region}, {"file", b.file}});
  j["schema"] = {{"features", manifest.schema.feature_names},
                 {"target", manifest.schema.target_name}};
  j["step_minutes"] = manifest.step_minutes;
  j["generator"] = {{"global_seed", manifest.global_seed}, {"days", manifest.days}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing manifest " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  DatasetManifest m;
  try {
    json j = json::parse(in);
    for (const auto& b : j.at("buildings"))
      m.buildings.push_back({b.at("id").get<std::string>(),
                             b.at("region").get<std::string>(),
                             b.at("file").get<std::string>()});
    m.step_minutes = j.at("step_minutes").get<int>();
    m.schema.feature_names =
        j.at("schema").at("features").get<std::vector<std::string>>();
    m.schema.target_name = j.at("schema").at("target").get<std::string>();
    m.schema.step_minutes = m.step_minutes;
    if (j.contains("generator")) {
      m.global_seed = j["generator"].value("global_seed", std::uint64_t{0});
      m.days = j["generator"].value("days", 0);
    }
  } catch (const json::exception& e) {
    throw DataError(DataErrorKind::kMalformed,
                    "manifest " + path.string() + ": " + e.what());
  }
  m.schema.validate();
  return m;
}

const SeriesFrame& Dataset::frame(const std::string& id) const {
  for (const auto& f : frames)
    if (f.building_id() == id) return f;
  throw InvalidArgument("dataset: unknown building id '" + id + "'");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.root = dir;
  ds.manifest = read_manifest(dir / "manifest.json");
  ds.frames.reserve(ds.manifest.buildings.size());
  for (const auto& b : ds.manifest.buildings)
    ds.frames.push_back(
        read_series_csv(dir / b.file, ds.manifest.schema, b.id, b.region));
  return ds;
}

std::uint64_t hash_ids(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  std::string joined;
  for (const auto& id : ids) {
    joined += id;
    joined.push_back('\n');
  }
  return hash_string(joined);
}

}  // namespace msgm::dataio
