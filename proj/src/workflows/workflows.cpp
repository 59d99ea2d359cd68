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

#include "msgm/error.hpp"
#include "msgm/workflows.hpp"

namespace msgm::workflows {

using dataio::SeriesFrame;
using evaluation::EvalMode;
using neural::ModelCheckpoint;
using splitting::IndexRange;
using splitting::WindowBatch;

namespace {

void say(const Log& log, const std::string& msg) {
  if (log) log(msg);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct PreparedData {
  neural::ModelSpec spec;
  dataio::Normalizer normalizer;
  WindowBatch train;
  WindowBatch val;
};

// Fits `job.n_repeats` models with distinct seeds and keeps the one with the
// lowest val RMSE.
PretrainResult run_repeats(const PretrainJob& job, const PreparedData& data,
                           std::vector<std::string> train_ids,
                           std::vector<std::string> val_ids, const Log& log) {
  const auto net = neural::make_network(data.spec);
  PretrainResult out;
  out.train_ids = std::move(train_ids);
  out.val_ids = std::move(val_ids);
  std::vector<std::string> all_ids = out.train_ids;
  all_ids.insert(all_ids.end(), out.val_ids.begin(), out.val_ids.end());

  for (std::size_t r = 0; r < job.n_repeats; ++r) {
    neural::TrainConfig cfg = job.train;
    cfg.seed = derive_seed(job.train.seed, {job.seed, r});
    std::vector<double> init(net->param_count());
    net->init_params(init, derive_seed(cfg.seed, {0x1417u}));
    const auto res = neural::fit(*net, init, data.train, data.val, cfg,
                                 data.normalizer.target_std(),
                                 [&](const neural::EpochRecord& e) {
                                   say(log, "  repeat " + std::to_string(r) + " epoch " +
                                                std::to_string(e.epoch) + " train_mse " +
                                                fmt_double(e.train_loss) + " val_rmse " +
                                                fmt_double(e.val_rmse));
                                 });
    out.repeat_val_rmse.push_back(res.best_val_rmse);
    say(log, "  repeat " + std::to_string(r) + " best val_rmse " +
                 fmt_double(res.best_val_rmse) + " at epoch " + std::to_string(res.best_epoch));
    if (r == 0 || res.best_val_rmse < out.checkpoint.metadata.best_val_rmse) {
      out.best_repeat = r;
      out.checkpoint.spec = data.spec;
      out.checkpoint.params = res.params;
      out.checkpoint.normalizer = data.normalizer;
      out.checkpoint.metadata = {cfg.seed,    res.epochs_run,          res.best_epoch,
                                 res.best_val_rmse, dataio::hash_ids(all_ids),
                                 all_ids.size()};
    }
  }
  return out;
}

std::vector<const SeriesFrame*> frames_for(const dataio::Dataset& ds,
                                           const std::vector<std::string>& ids) {
  std::vector<const SeriesFrame*> out;
  for (const auto& id : ids) out.push_back(&ds.frame(id));
  return out;
}

neural::ModelSpec spec_for(neural::ModelSpec spec, const dataio::FeatureSchema& schema) {
  spec.input_features = schema.n_columns();
  spec.lookback = splitting::kLookback;
  spec.horizon = splitting::kHorizon;
  spec.validate();
  return spec;
}

}  // namespace

void PretrainJob::validate() const {
  if (n_repeats < 1) throw InvalidArgument("pretrain: n_repeats must be >= 1");
  if (cap_train >= source_cap)
    throw InvalidArgument("pretrain: source cap must exceed the train series count");
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw InvalidArgument("pretrain: train_ratio must be in (0, 1)");
  train.validate();
}

std::size_t train_series_count(std::size_t n_used, const PretrainJob& job) {
  if (n_used >= job.source_cap) return job.cap_train;
  const auto n = static_cast<std::size_t>(std::floor(job.train_ratio * static_cast<double>(n_used)));
  return std::min(n, n_used - 1);
}

std::array<IndexRange, 2> temporal_split(std::size_t rows, double train_ratio) {
  const auto n = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(rows)));
  return {IndexRange{0, n}, IndexRange{n, rows}};
}

PretrainResult pretrain_msgm(const PretrainJob& job, const dataio::Dataset& dataset,
                             const Log& log) {
  job.validate();
  std::vector<std::string> ids = job.source_ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const auto frames = frames_for(dataset, ids);  // throws on unknown ids
  if (ids.size() < 2)
    throw InvalidArgument("pretrain: need at least 2 sources to owe a val series, got " +
                          std::to_string(ids.size()));
  require_same_sensor(frames.front()->schema(), frames);

  if (ids.size() > job.source_cap) {
    const auto keep = sample_without_replacement(ids.size(), job.source_cap,
                                                 derive_seed(job.seed, {0xCA9u}));
    std::vector<std::string> capped;
    for (auto k : keep) capped.push_back(ids[k]);
    ids = std::move(capped);
  }
  const std::size_t n_train = train_series_count(ids.size(), job);
  const auto order = permutation(ids.size(), derive_seed(job.seed, {0x5E7u}));
  std::vector<std::string> train_ids, val_ids;
  for (std::size_t k = 0; k < order.size(); ++k)
    (k < n_train ? train_ids : val_ids).push_back(ids[order[k]]);
  std::sort(train_ids.begin(), train_ids.end());
  std::sort(val_ids.begin(), val_ids.end());
  say(log, "pretrain_msgm: " + std::to_string(train_ids.size()) + " train / " +
               std::to_string(val_ids.size()) + " val series");

  PreparedData data;
  const auto train_frames = frames_for(dataset, train_ids);
  data.normalizer = dataio::Normalizer::fit(train_frames);
  data.spec = spec_for(job.spec, data.normalizer.schema());
  std::vector<WindowBatch> parts;
  for (const auto* f : train_frames)
    parts.push_back(splitting::make_windows(data.normalizer.apply(*f), {0, f->rows()}));
  data.train = splitting::shuffle_across_sources(parts, derive_seed(job.seed, {0x5Fu}));
  parts.clear();
  for (const auto* f : frames_for(dataset, val_ids))
    parts.push_back(splitting::make_windows(data.normalizer.apply(*f), {0, f->rows()}));
  data.val = splitting::shuffle_across_sources(parts, derive_seed(job.seed, {0x5Au}));
  say(log, "pretrain_msgm: " + std::to_string(data.train.size()) + " train windows, " +
               std::to_string(data.val.size()) + " val windows");
  return run_repeats(job, data, std::move(train_ids), std::move(val_ids), log);
}

PretrainResult pretrain_single_source(const PretrainJob& job, const dataio::Dataset& dataset,
                                      const Log& log) {
  job.validate();
  if (job.source_ids.size() != 1)
    throw InvalidArgument("pretrain-single: exactly one source id required");
  const SeriesFrame& frame = dataset.frame(job.source_ids.front());
  const auto [train_range, val_range] = temporal_split(frame.rows(), job.train_ratio);
  const std::size_t need = splitting::kLookback + splitting::kHorizon;
  if (train_range.size() < need || val_range.size() < need)
    throw EmptyBatch("pretrain-single: series '" + frame.building_id() + "' of " +
                     std::to_string(frame.rows()) +
                     " rows is too short for a window in both train and val portions");

  PreparedData data;
  data.normalizer = dataio::Normalizer::fit_rows(frame, train_range.begin, train_range.end);
  data.spec = spec_for(job.spec, data.normalizer.schema());
  const auto norm = data.normalizer.apply(frame);
  data.train = splitting::make_windows(norm, train_range);
  data.val = splitting::make_windows(norm, val_range);
  say(log, "pretrain_single_source: " + frame.building_id() + ", " +
               std::to_string(data.train.size()) + " train windows, " +
               std::to_string(data.val.size()) + " val windows");
  return run_repeats(job, data, {frame.building_id()}, {}, log);
}

FinetuneResult finetune_seasonal(const ModelCheckpoint& pretrained, const SeriesFrame& target,
                                 const FinetuneOptions& options, const Log& log) {
  neural::check_schema(pretrained, target.schema());
  const auto plan = splitting::seasonal_plan(target.rows(), options.train_months);
  FinetuneResult out;
  out.building_id = target.building_id();
  out.train_months = options.train_months;
  std::array<evaluation::MetricPair, 4> tests{};

  if (options.train_months == 0.0) {
    out.checkpoints.push_back(pretrained);
    const auto rep = evaluate_zero_shot(pretrained, target, EvalMode::kSeasonal,
                                        options.eval_stride);
    for (int k = 0; k < splitting::kSeasons; ++k) {
      out.seasons[k].test = rep.seasons[k];
      tests[k] = rep.seasons[k];
    }
    out.report = evaluation::seasonal_report(target.building_id(), tests);
    return out;
  }

  neural::TrainConfig cfg = options.train;
  cfg.learning_rate *= options.lr_scale;
  const auto net = neural::make_network(pretrained.spec);
  const auto norm = pretrained.normalizer.apply(target);
  for (int k = 0; k < splitting::kSeasons; ++k) {
    const auto& seg = plan.segments[k];
    const auto train = splitting::make_windows(norm, seg.train);
    const auto val = splitting::make_windows(norm, seg.val);
    neural::TrainConfig season_cfg = cfg;
    season_cfg.seed = derive_seed(cfg.seed, {hash_string(target.building_id()),
                                             static_cast<std::uint64_t>(k)});
    const auto res = neural::fit(*net, pretrained.params, train, val, season_cfg,
                                 pretrained.normalizer.target_std());
    ModelCheckpoint ck = pretrained;
    ck.params = res.params;
    ck.metadata.seed = season_cfg.seed;
    ck.metadata.epochs_run = res.epochs_run;
    ck.metadata.best_epoch = res.best_epoch;
    ck.metadata.best_val_rmse = res.best_val_rmse;
    auto& s = out.seasons[k];
    s.val_rmse = res.best_val_rmse;
    s.epochs_run = res.epochs_run;
    s.train_windows = train.size();
    s.test = evaluate_range(ck, target, seg.test, options.eval_stride);
    tests[k] = s.test;
    say(log, "finetune " + target.building_id() + " season " + std::to_string(k) +
                 ": val_rmse " + fmt_double(s.val_rmse) + ", test mae " +
                 fmt_double(s.test.mae));
    out.checkpoints.push_back(std::move(ck));
  }
  out.report = evaluation::seasonal_report(target.building_id(), tests);
  return out;
}

void AblationSpec::validate(std::size_t available) const {
  if (counts.empty()) throw InvalidArgument("ablation: no source counts");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1) throw InvalidArgument("ablation: counts must be positive");
    if (i > 0 && counts[i] <= counts[i - 1])
      throw InvalidArgument("ablation: counts must be strictly increasing");
  }
  if (counts.back() > available)
    throw InvalidArgument("ablation: " + std::to_string(counts.back()) +
                          " sources requested, only " + std::to_string(available) +
                          " available");
  if (small_repeats < 1) throw InvalidArgument("ablation: small_repeats must be >= 1");
  if (target_ids.empty()) throw InvalidArgument("ablation: empty target set");
}

evaluation::AblationReport ablate_sources(const AblationSpec& spec,
                                          const dataio::Dataset& dataset,
                                          const std::vector<std::string>& source_pool,
                                          const neural::ModelSpec& model,
                                          const neural::TrainConfig& train, const Log& log) {
  spec.validate(source_pool.size());
  std::vector<std::string> pool = source_pool;
  std::sort(pool.begin(), pool.end());
  const auto targets = frames_for(dataset, spec.target_ids);
  require_same_sensor(dataset.frame(pool.front()).schema(), targets);

  evaluation::AblationReport report;
  report.label = neural::to_string(model.arch);
  report.target_ids = spec.target_ids;
  std::sort(report.target_ids.begin(), report.target_ids.end());

  for (std::size_t n : spec.counts) {
    const std::size_t repeats = n <= spec.small_threshold ? spec.small_repeats : 1;
    evaluation::AblationRow row;
    row.n_sources = n;
    for (std::size_t r = 0; r < repeats; ++r) {
      const std::uint64_t run_seed = derive_seed(spec.seed, {n, r});
      const auto pick = sample_without_replacement(pool.size(), n, derive_seed(run_seed, {1}));
      PretrainJob job;
      for (auto k : pick) job.source_ids.push_back(pool[k]);
      job.spec = model;
      job.train = train;
      job.n_repeats = 1;
      job.seed = run_seed;
      say(log, "ablation n=" + std::to_string(n) + " run " + std::to_string(r));
      const auto pre = n == 1 ? pretrain_single_source(job, dataset, log)
                              : pretrain_msgm(job, dataset, log);
      const auto rep = evaluate_targets(pre.checkpoint, targets, spec.eval_mode,
                                        "n=" + std::to_string(n), spec.eval_stride);
      const double mae = rep.summary.mae.mean;
      row.run_maes.push_back(mae);
      say(log, "ablation n=" + std::to_string(n) + " run " + std::to_string(r) +
                   ": mean target mae " + fmt_double(mae));
      if (r == 0 || mae < row.best.mae) {
        std::size_t windows = 0;
        for (const auto& b : rep.buildings) windows += b.overall.n_windows;
        row.best = {mae, rep.summary.rmse.mean, windows};
        row.best_run = r;
        row.sources = job.source_ids;
        std::sort(row.sources.begin(), row.sources.end());
        row.target_mae = rep.summary.mae;
      }
    }
    report.rows.push_back(std::move(row));
  }
  evaluation::finalize(report);
  return report;
}

}  // namespace msgm::workflows
