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

#include "msgm/dataio.hpp"
#include "msgm/error.hpp"
#include "msgm/rng.hpp"

namespace msgm::dataio {

namespace {

constexpr double kMinStd = 1e-9;

struct RowSpan {
  const SeriesFrame* frame;
  std::size_t begin, end;
};

Normalizer fit_spans(std::vector<RowSpan> spans, std::uint64_t fitted_on) {
  if (spans.empty()) throw InvalidArgument("normalizer: empty frame list");
  const FeatureSchema& schema = spans.front().frame->schema();
  for (const auto& s : spans)
    if (s.frame->schema().columns() != schema.columns())
      throw SchemaMismatch("normalizer: frame '" + s.frame->building_id() +
                           "' has a different schema");
  std::stable_sort(spans.begin(), spans.end(), [](const RowSpan& a, const RowSpan& b) {
    return a.frame->building_id() < b.frame->building_id();
  });

  const std::size_t C = schema.n_columns();
  std::size_t count = 0;
  std::vector<double> mean(C, 0.0), var(C, 0.0);
  for (const auto& s : spans) {
    count += s.end - s.begin;
    for (std::size_t r = s.begin; r < s.end; ++r) {
      auto row = s.frame->row(r);
      for (std::size_t c = 0; c < C; ++c) mean[c] += row[c];
    }
  }
  if (count == 0) throw InvalidArgument("normalizer: no rows to fit on");
  for (auto& m : mean) m /= static_cast<double>(count);
  for (const auto& s : spans) {
    for (std::size_t r = s.begin; r < s.end; ++r) {
      auto row = s.frame->row(r);
      for (std::size_t c = 0; c < C; ++c) {
        const double d = row[c] - mean[c];
        var[c] += d * d;
      }
    }
  }
  std::vector<double> sd(C);
  for (std::size_t c = 0; c < C; ++c) {
    sd[c] = std::sqrt(var[c] / static_cast<double>(count));
    if (!(sd[c] >= kMinStd)) sd[c] = 1.0;
  }
  return Normalizer(schema.with_step(schema.step_minutes), std::move(mean),
                    std::move(sd), fitted_on);
}

}  // namespace

Normalizer::Normalizer(FeatureSchema schema, std::vector<double> mean,
                       std::vector<double> stddev, std::uint64_t fitted_on)
    : schema_(std::move(schema)),
      mean_(std::move(mean)),
      std_(std::move(stddev)),
      fitted_on_(fitted_on) {
  if (mean_.size() != schema_.n_columns() || std_.size() != schema_.n_columns())
    throw ShapeError("normalizer: statistics do not match schema width");
  for (double s : std_)
    if (!(s > 0.0) || !std::isfinite(s))
      throw InvalidArgument("normalizer: std must be positive and finite");
}

Normalizer Normalizer::fit(std::span<const SeriesFrame* const> frames) {
  std::vector<RowSpan> spans;
  std::vector<std::string> ids;
  for (const SeriesFrame* f : frames) {
    spans.push_back({f, 0, f->rows()});
    ids.push_back(f->building_id());
  }
  if (spans.empty()) throw InvalidArgument("normalizer: empty frame list");
  return fit_spans(std::move(spans), hash_ids(std::move(ids)));
}

Normalizer Normalizer::fit(const std::vector<SeriesFrame>& frames) {
  std::vector<const SeriesFrame*> ptrs;
  for (const auto& f : frames) ptrs.push_back(&f);
  return fit(std::span<const SeriesFrame* const>(ptrs));
}

Normalizer Normalizer::fit_rows(const SeriesFrame& frame, std::size_t begin,
                                std::size_t end) {
  if (begin >= end || end > frame.rows())
    throw InvalidArgument("normalizer: invalid row range");
  const std::uint64_t tag = derive_seed(hash_string(frame.building_id()), {begin, end});
  return fit_spans({{&frame, begin, end}}, tag);
}

std::shared_ptr<const NormalizedSeries> Normalizer::apply(
    const SeriesFrame& frame) const {
  if (frame.schema().columns() != schema_.columns())
    throw SchemaMismatch("normalizer: frame '" + frame.building_id() +
                         "' does not match the fitted schema");
  auto out = std::make_shared<NormalizedSeries>();
  out->building_id = frame.building_id();
  out->schema = frame.schema();
  out->rows = frame.rows();
  out->cols = frame.cols();
  out->values.resize(frame.values().size());
  const std::size_t C = frame.cols();
  auto src = frame.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::size_t c = i % C;
    out->values[i] = (src[i] - mean_[c]) / std_[c];
  }
  return out;
}

double Normalizer::invert_target(double z) const {
  return z * std_.back() + mean_.back();
}

CelsiusBlock Normalizer::invert_target(const NormalizedBlock& block) const {
  CelsiusBlock out(block.n, block.h);
  for (std::size_t i = 0; i < block.values.size(); ++i)
    out.values[i] = invert_target(block.values[i]);
  return out;
}

NormalizedBlock Normalizer::normalize_target(const CelsiusBlock& block) const {
  NormalizedBlock out(block.n, block.h);
  const std::size_t t = std_.size() - 1;
  for (std::size_t i = 0; i < block.values.size(); ++i)
    out.values[i] = normalize(t, block.values[i]);
  return out;
}

}  // namespace msgm::dataio
