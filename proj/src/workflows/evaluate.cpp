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

#include "msgm/error.hpp"
#include "msgm/neural/batch_ops.hpp"
#include "msgm/workflows.hpp"

namespace msgm::workflows {

using evaluation::EvalMode;
using evaluation::MetricPair;
using neural::ModelCheckpoint;
using splitting::IndexRange;

namespace {

MetricPair score(const ModelCheckpoint& ckpt, const neural::Network& net,
                 const dataio::SeriesFrame& frame,
                 const std::shared_ptr<const dataio::NormalizedSeries>& norm,
                 IndexRange range, std::size_t stride) {
  const auto batch = splitting::make_windows(norm, range, stride, ckpt.spec.lookback,
                                             ckpt.spec.horizon);
  const NormalizedBlock z = neural::forward_batch(net, ckpt.params, batch);
  const CelsiusBlock pred = ckpt.normalizer.invert_target(z);
  CelsiusBlock truth(batch.size(), ckpt.spec.horizon);
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (std::size_t j = 0; j < truth.h; ++j)
      truth.at(i, j) = frame.target(batch.start(i) + ckpt.spec.lookback + j);
  return evaluation::metrics(truth, pred);
}

}  // namespace

void require_same_sensor(const dataio::FeatureSchema& schema,
                         const std::vector<const dataio::SeriesFrame*>& frames) {
  for (const auto* f : frames)
    if (!(f->schema() == schema))
      throw SchemaMismatch("building '" + f->building_id() +
                           "' does not share the expected feature schema (same-sensor rule)");
}

MetricPair evaluate_range(const ModelCheckpoint& ckpt, const dataio::SeriesFrame& frame,
                          IndexRange range, std::size_t stride) {
  neural::check_schema(ckpt, frame.schema());
  const auto net = neural::make_network(ckpt.spec);
  return score(ckpt, *net, frame, ckpt.normalizer.apply(frame), range, stride);
}

evaluation::BuildingReport evaluate_zero_shot(const ModelCheckpoint& ckpt,
                                              const dataio::SeriesFrame& frame,
                                              EvalMode mode, std::size_t stride) {
  neural::check_schema(ckpt, frame.schema());
  const auto net = neural::make_network(ckpt.spec);
  const auto norm = ckpt.normalizer.apply(frame);
  if (mode == EvalMode::kAllInOne)
    return evaluation::all_in_one_report(
        frame.building_id(), score(ckpt, *net, frame, norm, {0, frame.rows()}, stride));
  const auto plan = splitting::seasonal_plan(frame.rows(), 0.0);
  std::array<MetricPair, 4> seasons{};
  for (int k = 0; k < splitting::kSeasons; ++k)
    seasons[k] = score(ckpt, *net, frame, norm, plan.segments[k].test, stride);
  return evaluation::seasonal_report(frame.building_id(), seasons);
}

evaluation::EvalReport evaluate_targets(const ModelCheckpoint& ckpt,
                                        const std::vector<const dataio::SeriesFrame*>& targets,
                                        EvalMode mode, std::string label,
                                        std::size_t stride) {
  require_same_sensor(ckpt.schema(), targets);
  std::vector<evaluation::BuildingReport> reports;
  for (const auto* t : targets) reports.push_back(evaluate_zero_shot(ckpt, *t, mode, stride));
  return evaluation::make_eval_report(
      std::move(label), mode, std::move(reports),
      {{"spec", neural::to_json(ckpt.spec)},
       {"eval_stride", stride},
       {"metadata",
        {{"seed", ckpt.metadata.seed},
         {"best_val_rmse", ckpt.metadata.best_val_rmse},
         {"source_ids_hash", ckpt.metadata.source_ids_hash},
         {"n_sources", ckpt.metadata.n_sources}}}});
}

ModelCheckpoint persistence_checkpoint(const dataio::FeatureSchema& schema) {
  ModelCheckpoint c;
  c.spec.arch = neural::Arch::kPersistence;
  c.spec.input_features = schema.n_columns();
  c.normalizer = dataio::Normalizer(schema, std::vector<double>(schema.n_columns(), 0.0),
                                    std::vector<double>(schema.n_columns(), 1.0), 0);
  return c;
}

evaluation::ComparisonReport compare_models(const evaluation::EvalReport& a,
                                            const evaluation::EvalReport& b) {
  return evaluation::compare(a, b);
}

}  // namespace msgm::workflows
