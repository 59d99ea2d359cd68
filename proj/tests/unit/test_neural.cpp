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

#include <gtest/gtest.h>
#include <omp.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>

#include "../support/gradcheck.hpp"
#include "msgm/error.hpp"
#include "msgm/neural/adamw.hpp"
#include "msgm/neural/batch_ops.hpp"
#include "msgm/neural/checkpoint.hpp"
#include "msgm/neural/kernels.hpp"
#include "msgm/neural/trainer.hpp"

namespace msgm::neural {
namespace {

using testing_support::grad_check;
using testing_support::random_series;

ModelSpec tiny(Arch arch, std::size_t layers = 1, double dropout = 0.0) {
  ModelSpec s;
  s.arch = arch;
  s.input_features = 3;
  s.lookback = 12;
  s.horizon = 2;
  s.hidden = 8;
  s.layers = layers;
  s.heads = arch == Arch::kTransformer ? 2 : 1;
  s.dropout = dropout;
  return s;
}

splitting::WindowBatch tiny_batch(const ModelSpec& s, std::size_t rows, std::uint64_t seed,
                                  std::size_t stride = 1) {
  return splitting::make_windows(random_series("t", rows, s.input_features, seed), {0, rows},
                                 stride, s.lookback, s.horizon);
}

std::vector<double> init(const Network& net, std::uint64_t seed) {
  std::vector<double> p(net.param_count());
  net.init_params(p, seed);
  return p;
}

class GradCheck : public ::testing::TestWithParam<std::tuple<Arch, int, double>> {};

TEST_P(GradCheck, CentralDifferencesAgree) {
  const auto [arch, layers, dropout] = GetParam();
  const auto net = make_network(tiny(arch, layers, dropout));
  const auto r = grad_check(*net, 17);
  EXPECT_EQ(r.checked, net->param_count());
  EXPECT_LE(r.worst_rel, 1e-4) << r.worst_slice;
}

INSTANTIATE_TEST_SUITE_P(Architectures, GradCheck,
                         ::testing::Values(std::tuple{Arch::kLstm, 1, 0.0},
                                           std::tuple{Arch::kLstm, 2, 0.0},
                                           std::tuple{Arch::kLstm, 2, 0.2},
                                           std::tuple{Arch::kTransformer, 1, 0.0},
                                           std::tuple{Arch::kTransformer, 2, 0.0},
                                           std::tuple{Arch::kTransformer, 2, 0.2}));

TEST(Kernels, SigmoidIsStableAtExtremes) {
  EXPECT_EQ(kernels::sigmoid(-800.0), 0.0);
  EXPECT_EQ(kernels::sigmoid(800.0), 1.0);
  EXPECT_DOUBLE_EQ(kernels::sigmoid(0.0), 0.5);
}

TEST(Spec, Validation) {
  auto s = tiny(Arch::kTransformer);
  s.heads = 3;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = tiny(Arch::kLstm);
  s.dropout = 0.7;
  EXPECT_THROW(s.validate(), InvalidArgument);
  EXPECT_EQ(arch_from_string("transformer"), Arch::kTransformer);
  EXPECT_THROW(arch_from_string("gru"), InvalidArgument);
}

TEST(Persistence, RepeatsLastTarget) {
  const auto s = tiny(Arch::kPersistence);
  const auto net = make_network(s);
  EXPECT_EQ(net->param_count(), 0u);
  const auto b = tiny_batch(s, 40, 3);
  const auto out = forward_batch(*net, {}, b);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double last = b.input(i)[(s.lookback - 1) * s.input_features + s.input_features - 1];
    for (std::size_t j = 0; j < s.horizon; ++j) EXPECT_EQ(out.at(i, j), last);
  }
}

TEST(Lstm, ZeroWeightsOutputHeadBias) {
  const auto s = tiny(Arch::kLstm, 2);
  const auto net = make_network(s);
  std::vector<double> p(net->param_count(), 0.0);
  const auto& hb = net->layout().find("head.bias");
  p[hb.offset] = 1.5;
  p[hb.offset + 1] = -2.0;
  const auto out = forward_batch(*net, p, tiny_batch(s, 30, 4));
  for (std::size_t i = 0; i < out.n; ++i) {
    EXPECT_EQ(out.at(i, 0), 1.5);
    EXPECT_EQ(out.at(i, 1), -2.0);
  }
}

TEST(Lstm, ParameterLayout) {
  const auto s = tiny(Arch::kLstm, 2);
  const auto net = make_network(s);
  const std::size_t H = 8, C = 3, Hz = 2;
  EXPECT_EQ(net->param_count(),
            4 * H * (C + H + 1) + 4 * H * (H + H + 1) + Hz * H + Hz);
}

TEST(Transformer, OrderOfTokensMatters) {
  const auto s = tiny(Arch::kTransformer, 1);
  const auto net = make_network(s);
  const auto p = init(*net, 5);
  const auto series = random_series("x", s.lookback + s.horizon, 3, 6);
  auto ws = net->make_workspace();
  std::vector<double> x(series->values.begin(), series->values.begin() + s.lookback * 3);
  std::vector<double> y1(2), y2(2);
  net->forward(p, x, y1, *ws, {});
  // Swap two early tokens: without positional information this would be
  // invisible to the final-token readout.
  for (int c = 0; c < 3; ++c) std::swap(x[0 * 3 + c], x[1 * 3 + c]);
  net->forward(p, x, y2, *ws, {});
  EXPECT_GT(std::abs(y1[0] - y2[0]) + std::abs(y1[1] - y2[1]), 1e-9);
}

TEST(Batch, SerialAndParallelAgree) {
  for (Arch a : {Arch::kLstm, Arch::kTransformer}) {
    const auto s = tiny(a, 2, 0.1);
    const auto net = make_network(s);
    const auto p = init(*net, 8);
    const auto b = tiny_batch(s, 90, 9);
    const auto f1 = forward_batch(*net, p, b);
    const auto f2 = forward_batch_serial(*net, p, b);
    EXPECT_EQ(f1.values, f2.values);

    std::vector<std::size_t> idx(b.size());
    std::iota(idx.begin(), idx.end(), 0);
    const DropoutSpec drop{0.1, 3};
    const auto g1 = loss_and_grad(*net, p, b, idx, drop);
    const auto g2 = loss_and_grad_serial(*net, p, b, idx, drop);
    EXPECT_NEAR(g1.loss, g2.loss, 1e-12 * g2.loss);
    ASSERT_EQ(g1.grad.size(), g2.grad.size());
    for (std::size_t i = 0; i < g1.grad.size(); ++i)
      ASSERT_NEAR(g1.grad[i], g2.grad[i], 1e-12 + 1e-10 * std::abs(g2.grad[i]));
  }
}

TEST(Batch, ThreadCountDoesNotChangeResults) {
  const auto s = tiny(Arch::kLstm, 1);
  const auto net = make_network(s);
  const auto p = init(*net, 1);
  const auto b = tiny_batch(s, 120, 2);
  const int before = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = loss_and_grad(*net, p, b);
  omp_set_num_threads(4);
  const auto c = loss_and_grad(*net, p, b);
  omp_set_num_threads(before);
  EXPECT_EQ(a.loss, c.loss);
  EXPECT_EQ(a.grad, c.grad);
}

TEST(Batch, DuplicatedBatchHasSameLossAndGradient) {
  const auto s = tiny(Arch::kTransformer, 1);
  const auto net = make_network(s);
  const auto p = init(*net, 2);
  const auto b = tiny_batch(s, 60, 3);
  const std::vector<std::size_t> once{0, 5, 9}, twice{0, 5, 9, 0, 5, 9};
  const auto a = loss_and_grad(*net, p, b, once);
  const auto c = loss_and_grad(*net, p, b, twice);
  EXPECT_NEAR(a.loss, c.loss, 1e-14);
  for (std::size_t i = 0; i < a.grad.size(); ++i) EXPECT_NEAR(a.grad[i], c.grad[i], 1e-14);
}

TEST(Batch, LossMatchesHandComputedMse) {
  const auto s = tiny(Arch::kLstm);
  const auto net = make_network(s);
  const auto p = init(*net, 4);
  const auto b = tiny_batch(s, 50, 5);
  const auto pred = forward_batch_serial(*net, p, b);
  const auto truth = batch_targets(b);
  double se = 0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const double e = pred.values[i] - truth.values[i];
    se += e * e;
  }
  const double mse = se / static_cast<double>(pred.values.size());
  EXPECT_NEAR(loss_and_grad(*net, p, b).loss, mse, 1e-12);
  EXPECT_NEAR(normalized_rmse(*net, p, b), std::sqrt(mse), 1e-12);
}

TEST(Batch, Errors) {
  const auto s = tiny(Arch::kLstm);
  const auto net = make_network(s);
  const auto p = init(*net, 4);
  const auto b = tiny_batch(s, 50, 5);
  EXPECT_THROW(loss_and_grad(*net, p, b, std::vector<std::size_t>{}), EmptyBatch);
  EXPECT_THROW(loss_and_grad(*net, std::vector<double>(3), b), ShapeError);
  auto wrong = s;
  wrong.lookback = 10;
  EXPECT_THROW(check_batch(*make_network(wrong), b), ShapeError);
}

TEST(Dropout, MasksAreDeterministicAndScaled) {
  const DropoutSpec spec{0.25, 99};
  const auto m = spec.mask_for(7);
  EXPECT_EQ(m.key, spec.mask_for(7).key);
  EXPECT_NE(m.key, spec.mask_for(8).key);
  std::size_t dropped = 0;
  for (std::uint64_t site = 0; site < 20000; ++site) {
    const double f = m.factor(site);
    ASSERT_TRUE(f == 0.0 || std::abs(f - 1.0 / 0.75) < 1e-15);
    dropped += f == 0.0;
  }
  EXPECT_NEAR(dropped / 20000.0, 0.25, 0.02);
  EXPECT_EQ(DropoutMask{}.factor(3), 1.0);
}

TEST(AdamW, FirstStepOracle) {
  std::vector<double> p{1.0};
  const std::vector<double> g{1.0};
  OptimizerState st(1);
  adamw_step(p, g, st, {0.1, 0.9, 0.999, 1e-8, 0.01});
  EXPECT_NEAR(p[0], 0.899, 1e-9);
  EXPECT_NEAR(p[0], 1.0 - 0.1 / (1.0 + 1e-8) - 0.1 * 0.01, 1e-15);
  EXPECT_EQ(st.step, 1u);
}

TEST(AdamW, WithoutDecayMatchesReferenceAdam) {
  Rng rng(12);
  const std::size_t n = 50;
  std::vector<double> p(n), ref(n), m(n, 0), v(n, 0);
  for (std::size_t i = 0; i < n; ++i) ref[i] = p[i] = rng.normal();
  OptimizerState st(n);
  const AdamWConfig cfg{0.01, 0.9, 0.999, 1e-8, 0.0};
  for (int t = 1; t <= 25; ++t) {
    std::vector<double> g(n);
    for (auto& x : g) x = rng.normal();
    adamw_step(p, g, st, cfg);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(0.9, t));
      const double vh = v[i] / (1 - std::pow(0.999, t));
      ref[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(p[i], ref[i], 1e-12);
}

TEST(AdamW, ShapeMismatch) {
  std::vector<double> p(3);
  OptimizerState st(3);
  EXPECT_THROW(adamw_step(p, std::vector<double>(2), st, {}), ShapeError);
}

TrainConfig quick_config() {
  TrainConfig c;
  c.batch_size = 16;
  c.learning_rate = 3e-3;
  c.max_epochs = 6;
  c.patience = 3;
  c.seed = 5;
  return c;
}

TEST(Fit, DeterministicAndKeepsBest) {
  const auto s = tiny(Arch::kLstm, 1, 0.1);
  const auto net = make_network(s);
  const auto p0 = init(*net, 3);
  const auto train = tiny_batch(s, 200, 1), val = tiny_batch(s, 80, 2);
  const auto a = fit(*net, p0, train, val, quick_config(), 2.0);
  const auto b = fit(*net, p0, train, val, quick_config(), 2.0);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.best_val_rmse, b.best_val_rmse);
  ASSERT_EQ(a.history.size(), a.epochs_run);
  double best = a.history[0].val_rmse;
  for (const auto& h : a.history) best = std::min(best, h.val_rmse);
  EXPECT_EQ(a.best_val_rmse, best);
  EXPECT_EQ(a.history[a.best_epoch - 1].val_rmse, best);
  EXPECT_NEAR(val_rmse_celsius(*net, a.params, val, 2.0), best, 1e-12);
  EXPECT_LT(a.history.back().train_loss, a.history.front().train_loss);
}

TEST(Fit, StopsAfterPatienceWithoutImprovement) {
  const auto s = tiny(Arch::kLstm);
  const auto net = make_network(s);
  const auto p0 = init(*net, 3);
  const auto train = tiny_batch(s, 200, 1), val = tiny_batch(s, 80, 2);
  auto cfg = quick_config();
  cfg.learning_rate = 0.5;  // unstable enough that val RMSE stops improving
  cfg.max_epochs = 40;
  cfg.patience = 2;
  const auto r = fit(*net, p0, train, val, cfg, 1.0);
  // Property: either the epoch budget ran out or exactly `patience` epochs
  // passed since the best one.
  if (r.epochs_run < cfg.max_epochs) {
    EXPECT_EQ(r.epochs_run - r.best_epoch, cfg.patience);
  }
  EXPECT_LE(r.epochs_run, cfg.max_epochs);
  std::size_t calls = 0;
  fit(*net, p0, train, val, cfg, 1.0, [&](const EpochRecord& e) { EXPECT_EQ(e.epoch, ++calls); });
  EXPECT_EQ(calls, r.epochs_run);
}

TEST(Fit, SubsamplesAndCountsSteps) {
  const auto s = tiny(Arch::kLstm);
  const auto net = make_network(s);
  auto cfg = quick_config();
  cfg.epoch_windows = 40;
  cfg.val_windows = 10;
  cfg.max_epochs = 3;
  cfg.patience = 10;
  const auto r = fit(*net, init(*net, 1), tiny_batch(s, 200, 1), tiny_batch(s, 80, 2), cfg, 1.0);
  EXPECT_EQ(r.epochs_run, 3u);
  EXPECT_EQ(r.steps, 3u * 3);  // ceil(40 / 16) per epoch
}

TEST(Fit, NonFiniteLossIsDivergence) {
  const auto s = tiny(Arch::kLstm);
  const auto net = make_network(s);
  auto bad = random_series("bad", 100, 3, 1);
  bad->values[20 * 3 + 2] = std::numeric_limits<double>::quiet_NaN();
  const auto train = splitting::make_windows(bad, {0, 100}, 1, s.lookback, s.horizon);
  EXPECT_THROW(fit(*net, init(*net, 1), train, tiny_batch(s, 60, 2), quick_config(), 1.0),
               DivergenceError);
  EXPECT_THROW(fit(*net, init(*net, 1), splitting::WindowBatch(12, 2), tiny_batch(s, 60, 2),
                   quick_config(), 1.0),
               EmptyBatch);
}

TEST(Checkpoint, Base64RoundTripIsExact) {
  const std::vector<double> v{0.0, -0.0, 1.0 / 3.0, -1e308, 4.9e-324,
                              std::numeric_limits<double>::max(), 123456.789};
  const auto back = base64_decode_f64(base64_encode_f64(v));
  ASSERT_EQ(back.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back[i]), std::bit_cast<std::uint64_t>(v[i]));
  EXPECT_EQ(base64_encode_f64({}), "");
  EXPECT_THROW(base64_decode_f64("abc"), DataError);
  EXPECT_THROW(base64_decode_f64("ab!d"), DataError);
}

ModelCheckpoint sample_checkpoint(Arch arch) {
  ModelCheckpoint c;
  c.spec = tiny(arch, 2, 0.1);
  const auto net = make_network(c.spec);
  c.params = init(*net, 77);
  c.normalizer = dataio::Normalizer({{"a", "b"}, "y", 15}, {1, 2, 3}, {0.5, 1.5, 2.5}, 1234);
  c.metadata = {9, 12, 7, 0.42, 555, 31};
  return c;
}

TEST(Checkpoint, FileRoundTrip) {
  for (Arch a : {Arch::kLstm, Arch::kTransformer}) {
    const auto c = sample_checkpoint(a);
    const auto path = std::filesystem::path(testing::TempDir()) / "msgm_ckpt.json";
    save_checkpoint(path, c);
    const auto back = load_checkpoint(path);
    EXPECT_EQ(back.spec, c.spec);
    EXPECT_EQ(back.params, c.params);
    EXPECT_EQ(back.normalizer, c.normalizer);
    EXPECT_EQ(back.metadata, c.metadata);
  }
}

TEST(Checkpoint, ValidationAndSchema) {
  auto c = sample_checkpoint(Arch::kLstm);
  EXPECT_NO_THROW(c.validate());
  EXPECT_NO_THROW(check_schema(c, {{"a", "b"}, "y", 15}));
  EXPECT_THROW(check_schema(c, {{"a", "c"}, "y", 15}), SchemaMismatch);
  c.params.pop_back();
  EXPECT_THROW(c.validate(), ShapeError);
  c = sample_checkpoint(Arch::kLstm);
  c.params[0] = std::nan("");
  EXPECT_THROW(c.validate(), DivergenceError);

  auto j = to_json(sample_checkpoint(Arch::kLstm));
  j["params"].erase(0);
  EXPECT_THROW(checkpoint_from_json(j), std::exception);
  EXPECT_THROW(load_checkpoint("/nonexistent/ckpt.json"), IoError);
}

TEST(Checkpoint, ConfigJsonOverlays) {
  TrainConfig base;
  base.batch_size = 7;
  const auto t = train_config_from_json({{"learning_rate", 0.5}}, base);
  EXPECT_EQ(t.batch_size, 7u);
  EXPECT_EQ(t.learning_rate, 0.5);
  EXPECT_EQ(train_config_from_json(to_json(t)), t);
  const auto m = tiny(Arch::kTransformer, 2, 0.1);
  EXPECT_EQ(model_spec_from_json(to_json(m)), m);
}

}  // namespace
}  // namespace msgm::neural
