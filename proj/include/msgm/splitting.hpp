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
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "msgm/dataio.hpp"
#include "nlohmann/json_fwd.hpp"

namespace msgm::splitting {

inline constexpr std::size_t kLookback = 96;
inline constexpr std::size_t kHorizon = 4;
inline constexpr std::size_t kSamplesPerDay = 96;
inline constexpr std::size_t kDaysPerMonth = 30;
inline constexpr std::size_t kSamplesPerMonth = kDaysPerMonth * kSamplesPerDay;
inline constexpr std::size_t kCanonicalYearDays = 360;
inline constexpr std::size_t kSeasonDays = 90;
inline constexpr std::size_t kValDays = 15;
inline constexpr int kSeasons = 4;

// Half-open sample index range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return size() == 0; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool operator==(const IndexRange&) const = default;
};

struct Provenance {
  std::string building_id;
  std::size_t start = 0;

  auto operator<=>(const Provenance&) const = default;
};

// Supervised examples viewing into normalized series: example i has inputs
// rows [start, start + L) of its series (all columns, target last) and
// targets the target column at rows [start + L, start + L + H).
class WindowBatch {
 public:
  WindowBatch() = default;
  WindowBatch(std::size_t lookback, std::size_t horizon)
      : lookback_(lookback), horizon_(horizon) {}

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t lookback() const { return lookback_; }
  std::size_t horizon() const { return horizon_; }
  // Input width F + 1; 0 for a batch with no sources.
  std::size_t channels() const;
  const dataio::FeatureSchema* schema() const;

  // Row-major [L x C] view of example i.
  std::span<const double> input(std::size_t i) const;
  double target(std::size_t i, std::size_t j) const;
  Provenance provenance(std::size_t i) const;
  std::size_t start(std::size_t i) const { return entries_[i].start; }

  // Adds every window start of `starts` for the given series.
  void add(std::shared_ptr<const dataio::NormalizedSeries> series,
           std::span<const std::size_t> starts);

  // Examples i in `indices`, in that order.
  WindowBatch subset(std::span<const std::size_t> indices) const;

 private:
  struct Entry {
    std::uint32_t source;
    std::uint32_t start;
  };

  std::uint32_t source_index(const std::shared_ptr<const dataio::NormalizedSeries>& s);

  std::size_t lookback_ = kLookback;
  std::size_t horizon_ = kHorizon;
  std::vector<std::shared_ptr<const dataio::NormalizedSeries>> sources_;
  std::vector<Entry> entries_;

  friend WindowBatch shuffle_across_sources(const std::vector<WindowBatch>&,
                                            std::uint64_t);
};

// Start indices of every window fully inside `range`. Throws EmptyBatch when
// |range| < lookback + horizon.
std::vector<std::size_t> window_starts(IndexRange range, std::size_t stride = 1,
                                       std::size_t lookback = kLookback,
                                       std::size_t horizon = kHorizon);

WindowBatch make_windows(std::shared_ptr<const dataio::NormalizedSeries> series,
                         IndexRange range, std::size_t stride = 1,
                         std::size_t lookback = kLookback,
                         std::size_t horizon = kHorizon);

// Concatenates and applies a seeded uniform permutation. Throws
// SchemaMismatch when the batches do not share schema, L and H.
WindowBatch shuffle_across_sources(const std::vector<WindowBatch>& batches,
                                   std::uint64_t seed);

struct SourceTargetSplit {
  std::vector<std::string> source_ids;
  std::vector<std::string> target_ids;
  std::uint64_t seed = 0;
  double target_fraction = 0;
};

// Region-stratified split; target counts per region by the largest-remainder
// rule (ties to the region listed first in the manifest).
SourceTargetSplit split_source_target(const dataio::DatasetManifest& manifest,
                                      double target_fraction, std::uint64_t seed);

nlohmann::json to_json(const SourceTargetSplit& split);
SourceTargetSplit split_from_json(const nlohmann::json& j);

struct SeasonSegment {
  IndexRange train;
  IndexRange val;
  IndexRange test;
};

struct SeasonalSplitPlan {
  double train_months = 0;
  std::array<SeasonSegment, kSeasons> segments{};
};

inline bool valid_train_months(double f) {
  return f == 0.0 || f == 0.5 || f == 1.0 || f == 2.5;
}

// Test k covers days [90k, 90k + 90) of the canonical 360-day year; val is the
// 15 days before test start and train the 30 f days before val, both wrapping
// modulo 360 days. f = 0 gives empty train and val.
SeasonalSplitPlan seasonal_plan(std::size_t frame_span, double train_months);

nlohmann::json to_json(const SeasonalSplitPlan& plan);

}  // namespace msgm::splitting
