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
#include <functional>
#include <span>
#include <vector>

#include "msgm/neural/adamw.hpp"
#include "msgm/neural/network.hpp"
#include "msgm/splitting.hpp"

namespace msgm::neural {

struct TrainConfig {
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;  // epochs without val improvement before stopping
  std::uint64_t seed = 0;
  // Windows drawn without replacement per epoch; 0 uses every train window.
  std::size_t epoch_windows = 0;
  // Fixed validation subsample; 0 uses every val window.
  std::size_t val_windows = 0;

  void validate() const;
  AdamWConfig adamw() const;
  bool operator==(const TrainConfig&) const = default;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;  // mean normalized MSE over the epoch's batches
  double val_rmse = 0;    // degrees C
};

struct TrainResult {
  std::vector<double> params;  // best-epoch parameters
  double best_val_rmse = 0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::size_t steps = 0;
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch AdamW on normalized MSE starting from `init`. After every epoch
// the val RMSE (in degrees C, via `target_std`) is computed and the best
// parameters retained. Throws EmptyBatch on empty inputs and DivergenceError
// on a non-finite loss.
TrainResult fit(const Network& net, std::span<const double> init,
                const splitting::WindowBatch& train,
                const splitting::WindowBatch& val, const TrainConfig& config,
                double target_std, const EpochCallback& on_epoch = {});

// Val RMSE in degrees C for a parameter vector.
double val_rmse_celsius(const Network& net, std::span<const double> params,
                        const splitting::WindowBatch& val, double target_std);

}  // namespace msgm::neural
