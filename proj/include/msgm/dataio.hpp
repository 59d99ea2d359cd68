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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "msgm/time.hpp"
#include "msgm/units.hpp"

namespace msgm::dataio {

// Column layout shared by every building of a dataset. Two datasets are
// "same-sensor" exactly when their schemas compare equal.
struct FeatureSchema {
  std::vector<std::string> feature_names;
  std::string target_name;
  int step_minutes = 15;

  // Throws InvalidArgument on empty/duplicate names or a target that is also
  // listed as a feature.
  void validate() const;

  std::size_t n_features() const { return feature_names.size(); }
  std::size_t n_columns() const { return feature_names.size() + 1; }
  // Features in order followed by the target.
  std::vector<std::string> columns() const;
  // Same names, different sampling step.
  FeatureSchema with_step(int minutes) const;

  bool operator==(const FeatureSchema&) const = default;

  // The schema the synthetic generator writes.
  static FeatureSchema building_default();
};

// One building's timestamped series in physical units. Immutable once built;
// the constructor enforces every invariant.
class SeriesFrame {
 public:
  SeriesFrame(std::string building_id, std::string region, FeatureSchema schema,
              std::vector<UtcSeconds> timestamps, std::vector<double> values);

  const std::string& building_id() const { return building_id_; }
  const std::string& region() const { return region_; }
  const FeatureSchema& schema() const { return schema_; }
  const std::vector<UtcSeconds>& timestamps() const { return timestamps_; }

  std::size_t rows() const { return timestamps_.size(); }
  std::size_t cols() const { return schema_.n_columns(); }
  std::size_t target_column() const { return cols() - 1; }
  // Sampling step in seconds; 0 for a single-row frame.
  std::int64_t step_seconds() const { return step_seconds_; }

  double value(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }
  double target(std::size_t r) const { return value(r, target_column()); }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }
  std::span<const double> values() const { return values_; }
  std::vector<double> column(std::size_t c) const;

 private:
  std::string building_id_;
  std::string region_;
  FeatureSchema schema_;
  std::vector<UtcSeconds> timestamps_;
  std::vector<double> values_;
  std::int64_t step_seconds_ = 0;
};

// A z-scored copy of a frame's values. Shared by the window batches that
// view into it.
struct NormalizedSeries {
  std::string building_id;
  FeatureSchema schema;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double value(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Per-column z-score statistics fitted on source-training rows only.
class Normalizer {
 public:
  Normalizer() = default;
  Normalizer(FeatureSchema schema, std::vector<double> mean,
             std::vector<double> stddev, std::uint64_t fitted_on);

  // Population statistics over the concatenated rows of all frames. Frames are
  // accumulated in building-id order so the result does not depend on the
  // order of the list. Columns with std < 1e-9 get std = 1.
  static Normalizer fit(std::span<const SeriesFrame* const> frames);
  static Normalizer fit(const std::vector<SeriesFrame>& frames);
  // Fit on a row range of a single frame.
  static Normalizer fit_rows(const SeriesFrame& frame, std::size_t begin,
                             std::size_t end);

  std::shared_ptr<const NormalizedSeries> apply(const SeriesFrame& frame) const;
  double normalize(std::size_t column, double x) const {
    return (x - mean_[column]) / std_[column];
  }

  double invert_target(double z) const;
  CelsiusBlock invert_target(const NormalizedBlock& block) const;
  NormalizedBlock normalize_target(const CelsiusBlock& block) const;

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return std_; }
  double target_std() const { return std_.back(); }
  // Hash of the fitted building ids (or of id and row range for fit_rows).
  std::uint64_t fitted_on() const { return fitted_on_; }

  bool operator==(const Normalizer&) const = default;

 private:
  FeatureSchema schema_;
  std::vector<double> mean_;
  std::vector<double> std_;
  std::uint64_t fitted_on_ = 0;
};

// Reads a CSV with a `timestamp` column followed by the schema's columns in
// any order (extra columns are ignored). The returned frame's step is the one
// detected in the file; the schema's step_minutes is overwritten with it.
SeriesFrame read_series_csv(const std::filesystem::path& path,
                            const FeatureSchema& schema,
                            std::string building_id = {},
                            std::string region = {});

// Writes `timestamp,<features...>,<target>` with shortest round-trip numbers.
void write_series_csv(const std::filesystem::path& path,
                      const SeriesFrame& frame);

// Bin-mean downsampling to 15 minutes, bins aligned to the first timestamp.
// A trailing partial bin is dropped.
SeriesFrame resample_15min(const SeriesFrame& frame);

struct BuildingEntry {
  std::string id;
  std::string region;
  std::string file;  // relative to the manifest's directory

  bool operator==(const BuildingEntry&) const = default;
};

struct DatasetManifest {
  std::vector<BuildingEntry> buildings;
  FeatureSchema schema;
  int step_minutes = 15;
  std::uint64_t global_seed = 0;
  int days = 0;

  const BuildingEntry& find(const std::string& id) const;
};

void write_manifest(const std::filesystem::path& path,
                    const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

// A manifest together with its loaded frames, in manifest order.
struct Dataset {
  std::filesystem::path root;
  DatasetManifest manifest;
  std::vector<SeriesFrame> frames;

  const SeriesFrame& frame(const std::string& id) const;
};

// Loads `<dir>/manifest.json` and every listed CSV.
Dataset load_dataset(const std::filesystem::path& dir);

// Order-insensitive hash of a set of building ids.
std::uint64_t hash_ids(std::vector<std::string> ids);

}  // namespace msgm::dataio
