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

#include "msgm/neural/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msgm/error.hpp"
#include "msgm/neural/batch_ops.hpp"
#include "msgm/rng.hpp"

namespace msgm::neural {

using splitting::WindowBatch;

void TrainConfig::validate() const {
  if (batch_size < 1) throw InvalidArgument("train: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("train: learning_rate must be > 0");
  if (weight_decay < 0.0) throw InvalidArgument("train: weight_decay must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
    throw InvalidArgument("train: betas must be in [0, 1)");
  if (!(eps > 0.0)) throw InvalidArgument("train: eps must be > 0");
  if (max_epochs < 1) throw InvalidArgument("train: max_epochs must be >= 1");
  if (patience < 1) throw InvalidArgument("train: patience must be >= 1");
}

AdamWConfig TrainConfig::adamw() const {
  return {learning_rate, beta1, beta2, eps, weight_decay};
}

double val_rmse_celsius(const Network& net, std::span<const double> params,
                        const WindowBatch& val, double target_std) {
  // The target inversion is affine, so errors scale by the target std.
  return normalized_rmse(net, params, val) * target_std;
}

TrainResult fit(const Network& net, std::span<const double> init,
                const WindowBatch& train, const WindowBatch& val_full,
                const TrainConfig& config, double target_std,
                const EpochCallback& on_epoch) {
  config.validate();
  if (train.empty()) throw EmptyBatch("fit: empty train batch");
  if (val_full.empty()) throw EmptyBatch("fit: empty val batch");
  if (init.size() != net.param_count())
    throw ShapeError("fit: initial parameters do not match the model");
  check_batch(net, train);
  check_batch(net, val_full);

  WindowBatch val_sub;
  const WindowBatch* val = &val_full;
  if (config.val_windows > 0 && config.val_windows < val_full.size()) {
    val_sub = val_full.subset(sample_without_replacement(
        val_full.size(), config.val_windows, derive_seed(config.seed, {0x7A1u})));
    val = &val_sub;
  }

  TrainResult result;
  std::vector<double> params(init.begin(), init.end());
  OptimizerState state(params.size());
  const AdamWConfig opt = config.adamw();
  const double rate = net.spec().dropout;
  const std::size_t per_epoch = config.epoch_windows > 0
                                    ? std::min(config.epoch_windows, train.size())
                                    : train.size();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const std::uint64_t epoch_seed = derive_seed(config.seed, {0xE90Cu, epoch});
    std::vector<std::size_t> order = permutation(train.size(), epoch_seed);
    order.resize(per_epoch);

    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t b = 0; b < per_epoch; b += config.batch_size, ++batch_index) {
      const std::size_t e = std::min(per_epoch, b + config.batch_size);
      std::span<const std::size_t> idx(order.data() + b, e - b);
      const DropoutSpec drop{rate, derive_seed(epoch_seed, {batch_index})};
      LossGrad lg = loss_and_grad(net, params, train, idx, drop);
      if (!std::isfinite(lg.loss))
        throw DivergenceError("fit: non-finite loss at epoch " + std::to_string(epoch) +
                              ", step " + std::to_string(result.steps + 1));
      adamw_step(params, lg.grad, state, opt);
      ++result.steps;
      loss_sum += lg.loss * static_cast<double>(idx.size());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(per_epoch);
    rec.val_rmse = val_rmse_celsius(net, params, *val, target_std);
    if (!std::isfinite(rec.val_rmse))
      throw DivergenceError("fit: non-finite val RMSE at epoch " + std::to_string(epoch));
    result.history.push_back(rec);
    result.epochs_run = epoch;
    if (on_epoch) on_epoch(rec);

    if (epoch == 1 || rec.val_rmse < result.best_val_rmse) {
      result.best_val_rmse = rec.val_rmse;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace msgm::neural
