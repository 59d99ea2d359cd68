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

#include "msgm/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "msgm/error.hpp"
#include "msgm/rng.hpp"
#include "nlohmann/json.hpp"

namespace msgm::splitting {

std::size_t WindowBatch::channels() const {
  return sources_.empty() ? 0 : sources_.front()->cols;
}

const dataio::FeatureSchema* WindowBatch::schema() const {
  return sources_.empty() ? nullptr : &sources_.front()->schema;
}

std::span<const double> WindowBatch::input(std::size_t i) const {
  const Entry& e = entries_[i];
  const auto& s = *sources_[e.source];
  return {s.values.data() + static_cast<std::size_t>(e.start) * s.cols,
          lookback_ * s.cols};
}

double WindowBatch::target(std::size_t i, std::size_t j) const {
  const Entry& e = entries_[i];
  const auto& s = *sources_[e.source];
  return s.value(e.start + lookback_ + j, s.cols - 1);
}

Provenance WindowBatch::provenance(std::size_t i) const {
  const Entry& e = entries_[i];
  return {sources_[e.source]->building_id, e.start};
}

std::uint32_t WindowBatch::source_index(
    const std::shared_ptr<const dataio::NormalizedSeries>& s) {
  for (std::size_t k = 0; k < sources_.size(); ++k)
    if (sources_[k] == s) return static_cast<std::uint32_t>(k);
  if (!sources_.empty() && sources_.front()->schema.columns() != s->schema.columns())
    throw SchemaMismatch("window batch: series '" + s->building_id +
                         "' has a different feature schema");
  sources_.push_back(s);
  return static_cast<std::uint32_t>(sources_.size() - 1);
}

void WindowBatch::add(std::shared_ptr<const dataio::NormalizedSeries> series,
                      std::span<const std::size_t> starts) {
  if (starts.empty()) return;
  const std::uint32_t src = source_index(series);
  for (std::size_t st : starts) {
    if (st + lookback_ + horizon_ > series->rows)
      throw InvalidArgument("window batch: window exceeds series length");
    entries_.push_back({src, static_cast<std::uint32_t>(st)});
  }
}

WindowBatch WindowBatch::subset(std::span<const std::size_t> indices) const {
  WindowBatch out(lookback_, horizon_);
  out.sources_ = sources_;
  out.entries_.reserve(indices.size());
  for (std::size_t i : indices) out.entries_.push_back(entries_.at(i));
  return out;
}

std::vector<std::size_t> window_starts(IndexRange range, std::size_t stride,
                                       std::size_t lookback, std::size_t horizon) {
  if (stride < 1) throw InvalidArgument("windows: stride must be >= 1");
  const std::size_t span = lookback + horizon;
  if (range.size() < span)
    throw EmptyBatch("windows: range of " + std::to_string(range.size()) +
                     " samples is shorter than lookback + horizon = " +
                     std::to_string(span));
  const std::size_t count = (range.size() - span) / stride + 1;
  std::vector<std::size_t> starts(count);
  for (std::size_t k = 0; k < count; ++k) starts[k] = range.begin + k * stride;
  return starts;
}

WindowBatch make_windows(std::shared_ptr<const dataio::NormalizedSeries> series,
                         IndexRange range, std::size_t stride, std::size_t lookback,
                         std::size_t horizon) {
  if (range.end > series->rows)
    throw InvalidArgument("windows: range exceeds series '" + series->building_id + "'");
  auto starts = window_starts(range, stride, lookback, horizon);
  WindowBatch batch(lookback, horizon);
  batch.add(std::move(series), starts);
  return batch;
}

WindowBatch shuffle_across_sources(const std::vector<WindowBatch>& batches,
                                   std::uint64_t seed) {
  if (batches.empty()) return WindowBatch();
  WindowBatch out(batches.front().lookback(), batches.front().horizon());
  for (const auto& b : batches) {
    if (b.lookback() != out.lookback_ || b.horizon() != out.horizon_)
      throw SchemaMismatch("shuffle: batches differ in lookback or horizon");
    for (const auto& e : b.entries_) {
      const std::uint32_t src = out.source_index(b.sources_[e.source]);
      out.entries_.push_back({src, e.start});
    }
  }
  Rng rng(derive_seed(seed, {0x5u}));
  rng.shuffle(std::span<WindowBatch::Entry>(out.entries_));
  return out;
}

SourceTargetSplit split_source_target(const dataio::DatasetManifest& manifest,
                                      double target_fraction, std::uint64_t seed) {
  if (!(target_fraction > 0.0 && target_fraction < 0.5))
    throw InvalidArgument("split: target_fraction must be in (0, 0.5)");
  const std::size_t total = manifest.buildings.size();
  const auto n_targets =
      static_cast<std::size_t>(std::llround(static_cast<double>(total) * target_fraction));
  if (n_targets == 0)
    throw InvalidArgument("split: fraction " + std::to_string(target_fraction) +
                          " of " + std::to_string(total) + " buildings owes no targets");

  // Regions in order of first appearance.
  std::vector<std::string> regions;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < total; ++i) {
    const auto& r = manifest.buildings[i].region;
    if (!members.count(r)) regions.push_back(r);
    members[r].push_back(i);
  }

  // Largest remainder: floor quotas, then hand out the rest by descending
  // fractional part; exact integer arithmetic on n_r * T mod N.
  std::vector<std::size_t> quota(regions.size());
  std::vector<std::size_t> order(regions.size());
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < regions.size(); ++k) {
    quota[k] = members[regions[k]].size() * n_targets / total;
    assigned += quota[k];
    order[k] = k;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return members[regions[a]].size() * n_targets % total >
           members[regions[b]].size() * n_targets % total;
  });
  for (std::size_t k = 0; assigned < n_targets; ++k, ++assigned) ++quota[order[k]];

  std::vector<bool> is_target(total, false);
  for (std::size_t k = 0; k < regions.size(); ++k) {
    const auto& ids = members[regions[k]];
    if (quota[k] > 0 && ids.size() < 2)
      throw InvalidArgument("split: region '" + regions[k] +
                            "' owes a target but has fewer than 2 buildings");
    auto pick = sample_without_replacement(ids.size(), quota[k],
                                           derive_seed(seed, {hash_string(regions[k])}));
    for (std::size_t p : pick) is_target[ids[p]] = true;
  }

  SourceTargetSplit split;
  split.seed = seed;
  split.target_fraction = target_fraction;
  for (std::size_t i = 0; i < total; ++i)
    (is_target[i] ? split.target_ids : split.source_ids)
        .push_back(manifest.buildings[i].id);
  return split;
}

nlohmann::json to_json(const SourceTargetSplit& split) {
  return {{"sources", split.source_ids},
          {"targets", split.target_ids},
          {"seed", split.seed},
          {"target_fraction", split.target_fraction}};
}

SourceTargetSplit split_from_json(const nlohmann::json& j) {
  SourceTargetSplit s;
  try {
    s.source_ids = j.at("sources").get<std::vector<std::string>>();
    s.target_ids = j.at("targets").get<std::vector<std::string>>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.target_fraction = j.value("target_fraction", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kMalformed, std::string("split file: ") + e.what());
  }
  return s;
}

SeasonalSplitPlan seasonal_plan(std::size_t frame_span, double train_months) {
  if (!valid_train_months(train_months))
    throw InvalidArgument("seasonal plan: train months must be one of 0, 0.5, 1, 2.5");
  constexpr std::size_t kYear = kCanonicalYearDays * kSamplesPerDay;
  if (frame_span < kYear)
    throw InvalidArgument("seasonal plan: series spans " + std::to_string(frame_span) +
                          " samples, need at least 360 days");

  // 30 f days; f is a multiple of 0.5 so this is exact.
  const auto train_days =
      static_cast<std::size_t>(std::lround(train_months * kDaysPerMonth));
  const auto wrap = [](std::ptrdiff_t day) {
    const auto y = static_cast<std::ptrdiff_t>(kCanonicalYearDays);
    return static_cast<std::size_t>(((day % y) + y) % y);
  };
  // Range of `days` ending at day `end_day` (exclusive), wrapped.
  const auto before = [&](std::size_t end_day, std::size_t days) {
    if (days == 0) return IndexRange{};
    const std::size_t first = wrap(static_cast<std::ptrdiff_t>(end_day) -
                                   static_cast<std::ptrdiff_t>(days));
    return IndexRange{first * kSamplesPerDay, (first + days) * kSamplesPerDay};
  };

  SeasonalSplitPlan plan;
  plan.train_months = train_months;
  for (int k = 0; k < kSeasons; ++k) {
    auto& seg = plan.segments[k];
    const std::size_t test_day = static_cast<std::size_t>(k) * kSeasonDays;
    seg.test = {test_day * kSamplesPerDay, (test_day + kSeasonDays) * kSamplesPerDay};
    if (train_days == 0) continue;
    const std::size_t val_first =
        wrap(static_cast<std::ptrdiff_t>(test_day) - static_cast<std::ptrdiff_t>(kValDays));
    seg.val = before(val_first + kValDays, kValDays);
    seg.train = before(val_first, train_days);
  }
  return plan;
}

nlohmann::json to_json(const SeasonalSplitPlan& plan) {
  nlohmann::json segs = nlohmann::json::array();
  const auto days = [](const IndexRange& r) {
    return nlohmann::json{{"first_day", r.begin / kSamplesPerDay},
                          {"end_day", r.end / kSamplesPerDay},
                          {"begin_index", r.begin},
                          {"end_index", r.end}};
  };
  for (int k = 0; k < kSeasons; ++k) {
    const auto& s = plan.segments[k];
    segs.push_back({{"season", k},
                    {"train", days(s.train)},
                    {"val", days(s.val)},
                    {"test", days(s.test)}});
  }
  return {{"train_months", plan.train_months},
          {"canonical_year_days", kCanonicalYearDays},
          {"samples_per_day", kSamplesPerDay},
          {"segments", segs}};
}

}  // namespace msgm::splitting
