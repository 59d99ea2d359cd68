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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "msgm/dataio.hpp"
#include "msgm/neural/network.hpp"
#include "msgm/neural/trainer.hpp"
#include "msgm/splitting.hpp"
#include "msgm/units.hpp"
#include "nlohmann/json.hpp"

namespace msgm::neural {

inline constexpr int kCheckpointVersion = 1;

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_val_rmse = 0;
  std::uint64_t source_ids_hash = 0;
  std::size_t n_sources = 0;

  bool operator==(const TrainingMetadata&) const = default;
};

// A trained model. The normalizer carries the feature schema the model was
// trained on.
struct ModelCheckpoint {
  ModelSpec spec;
  std::vector<double> params;
  dataio::Normalizer normalizer;
  TrainingMetadata metadata;

  const dataio::FeatureSchema& schema() const { return normalizer.schema(); }
  // Throws ShapeError on a parameter count mismatch and DivergenceError on
  // non-finite parameters.
  void validate() const;
};

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j, ModelSpec base = {});
nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
nlohmann::json to_json(const dataio::FeatureSchema& schema);
dataio::FeatureSchema schema_from_json(const nlohmann::json& j);
nlohmann::json to_json(const dataio::Normalizer& normalizer);
dataio::Normalizer normalizer_from_json(const nlohmann::json& j);

// Parameter slices are stored by name as base64 of little-endian float64.
nlohmann::json to_json(const ModelCheckpoint& ckpt);
ModelCheckpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

std::string base64_encode_f64(const std::vector<double>& values);
std::vector<double> base64_decode_f64(const std::string& text);

// Throws SchemaMismatch unless the batch was built from series with the
// checkpoint's schema.
void check_schema(const ModelCheckpoint& ckpt, const dataio::FeatureSchema& schema);

// Normalized predictions for every example of a batch built with the
// checkpoint's normalizer.
NormalizedBlock forward(const ModelCheckpoint& ckpt, const splitting::WindowBatch& batch);

}  // namespace msgm::neural
