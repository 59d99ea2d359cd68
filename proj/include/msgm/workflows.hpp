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
#include <functional>
#include <string>
#include <vector>

#include "msgm/dataio.hpp"
#include "msgm/evaluation.hpp"
#include "msgm/neural/checkpoint.hpp"
#include "msgm/neural/network.hpp"
#include "msgm/neural/trainer.hpp"
#include "msgm/splitting.hpp"

namespace msgm::workflows {

using Log = std::function<void(const std::string&)>;

// ---- zero-shot evaluation ----

// Metrics of the checkpoint on the stride-1 windows of `range` (stride > 1
// subsamples window starts).
evaluation::MetricPair evaluate_range(const neural::ModelCheckpoint& ckpt,
                                      const dataio::SeriesFrame& frame,
                                      splitting::IndexRange range, std::size_t stride = 1);

// Seasonal mode scores the four test ranges of the seasonal plan and reports
// their unweighted mean; all-in-one scores every window of the series.
evaluation::BuildingReport evaluate_zero_shot(const neural::ModelCheckpoint& ckpt,
                                              const dataio::SeriesFrame& frame,
                                              evaluation::EvalMode mode,
                                              std::size_t stride = 1);

evaluation::EvalReport evaluate_targets(const neural::ModelCheckpoint& ckpt,
                                        const std::vector<const dataio::SeriesFrame*>& targets,
                                        evaluation::EvalMode mode, std::string label,
                                        std::size_t stride = 1);

// A parameter-free persistence checkpoint. The normalizer only fixes the
// schema; outputs are the last observed target in any case.
neural::ModelCheckpoint persistence_checkpoint(const dataio::FeatureSchema& schema);

// ---- pretraining ----

struct PretrainJob {
  std::vector<std::string> source_ids;
  neural::ModelSpec spec;
  neural::TrainConfig train;
  std::size_t n_repeats = 4;
  std::size_t source_cap = 200;
  std::size_t cap_train = 180;  // train series when the cap is reached
  double train_ratio = 0.9;     // below the cap
  std::uint64_t seed = 0;

  void validate() const;
};

struct PretrainResult {
  neural::ModelCheckpoint checkpoint;
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::vector<double> repeat_val_rmse;
  std::size_t best_repeat = 0;
};

// Number of train series out of `n` used series: 180 of 200 at the cap,
// otherwise floor(0.9 n) with at least one val series.
std::size_t train_series_count(std::size_t n_used, const PretrainJob& job);

PretrainResult pretrain_msgm(const PretrainJob& job, const dataio::Dataset& dataset,
                             const Log& log = {});

// Exactly one source; temporal split with the final 10% as validation.
PretrainResult pretrain_single_source(const PretrainJob& job,
                                      const dataio::Dataset& dataset,
                                      const Log& log = {});

// Train/val row split of a single series: [0, floor(0.9 T)) and the rest.
std::array<splitting::IndexRange, 2> temporal_split(std::size_t rows, double train_ratio);

// ---- fine-tuning ----

struct FinetuneOptions {
  double train_months = 0.5;
  neural::TrainConfig train;  // the pretraining config; lr is scaled below
  double lr_scale = 0.1;
  std::size_t eval_stride = 1;
};

struct SeasonResult {
  evaluation::MetricPair test;
  double val_rmse = 0;  // 0 when f = 0
  std::size_t epochs_run = 0;
  std::size_t train_windows = 0;
};

struct FinetuneResult {
  std::string building_id;
  double train_months = 0;
  std::array<SeasonResult, 4> seasons{};
  // One checkpoint per season, or just the pretrained one when f = 0.
  std::vector<neural::ModelCheckpoint> checkpoints;
  evaluation::BuildingReport report;
};

FinetuneResult finetune_seasonal(const neural::ModelCheckpoint& pretrained,
                                 const dataio::SeriesFrame& target,
                                 const FinetuneOptions& options, const Log& log = {});

// ---- source-count ablation ----

struct AblationSpec {
  std::vector<std::size_t> counts{1, 2, 4, 8, 16, 32, 64, 128};
  std::size_t small_repeats = 4;
  std::size_t small_threshold = 16;  // counts <= this are repeated
  std::vector<std::string> target_ids;
  std::uint64_t seed = 0;
  evaluation::EvalMode eval_mode = evaluation::EvalMode::kSeasonal;
  std::size_t eval_stride = 1;

  void validate(std::size_t available_sources) const;
};

// One pretraining per (n, repeat) on a seeded sample of `source_pool`, each
// scored zero-shot on the fixed targets. n = 1 uses the single-source path.
evaluation::AblationReport ablate_sources(const AblationSpec& spec,
                                          const dataio::Dataset& dataset,
                                          const std::vector<std::string>& source_pool,
                                          const neural::ModelSpec& model,
                                          const neural::TrainConfig& train,
                                          const Log& log = {});

// ---- comparison ----

evaluation::ComparisonReport compare_models(const evaluation::EvalReport& a,
                                            const evaluation::EvalReport& b);

// Throws SchemaMismatch when any frame's schema differs from `schema`.
void require_same_sensor(const dataio::FeatureSchema& schema,
                         const std::vector<const dataio::SeriesFrame*>& frames);

}  // namespace msgm::workflows
