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

#include "msgm/neural/checkpoint.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>

#include "msgm/error.hpp"
#include "msgm/neural/batch_ops.hpp"

namespace msgm::neural {

using nlohmann::json;

namespace {

constexpr char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::string base64_encode_f64(const std::vector<double>& values) {
  std::vector<unsigned char> bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>(bits >> (8 * b)));
  }
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    const std::size_t left = bytes.size() - i;
    std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (left > 1) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (left > 2) chunk |= bytes[i + 2];
    out += kB64[(chunk >> 18) & 63];
    out += kB64[(chunk >> 12) & 63];
    out += left > 1 ? kB64[(chunk >> 6) & 63] : '=';
    out += left > 2 ? kB64[chunk & 63] : '=';
  }
  return out;
}

std::vector<double> base64_decode_f64(const std::string& text) {
  if (text.size() % 4 != 0) throw DataError(DataErrorKind::kMalformed, "base64: bad length");
  std::vector<unsigned char> bytes;
  bytes.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::array<int, 4> q{};
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        q[k] = 0;
        ++pad;
      } else if ((q[k] = b64_value(c)) < 0 || pad > 0) {
        throw DataError(DataErrorKind::kMalformed, "base64: invalid character");
      }
    }
    const std::uint32_t chunk = (q[0] << 18) | (q[1] << 12) | (q[2] << 6) | q[3];
    bytes.push_back(static_cast<unsigned char>(chunk >> 16));
    if (pad < 2) bytes.push_back(static_cast<unsigned char>(chunk >> 8));
    if (pad < 1) bytes.push_back(static_cast<unsigned char>(chunk));
  }
  if (bytes.size() % 8 != 0)
    throw DataError(DataErrorKind::kMalformed, "base64: payload is not float64 aligned");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

json to_json(const ModelSpec& s) {
  return {{"arch", to_string(s.arch)},   {"input_features", s.input_features},
          {"lookback", s.lookback},      {"horizon", s.horizon},
          {"hidden", s.hidden},          {"layers", s.layers},
          {"heads", s.heads},            {"dropout", s.dropout}};
}

ModelSpec model_spec_from_json(const json& j, ModelSpec s) {
  if (j.contains("arch")) s.arch = arch_from_string(j["arch"].get<std::string>());
  s.input_features = j.value("input_features", s.input_features);
  s.lookback = j.value("lookback", s.lookback);
  s.horizon = j.value("horizon", s.horizon);
  s.hidden = j.value("hidden", s.hidden);
  s.layers = j.value("layers", s.layers);
  s.heads = j.value("heads", s.heads);
  s.dropout = j.value("dropout", s.dropout);
  s.validate();
  return s;
}

json to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},     {"learning_rate", c.learning_rate},
          {"weight_decay", c.weight_decay}, {"beta1", c.beta1},
          {"beta2", c.beta2},               {"eps", c.eps},
          {"max_epochs", c.max_epochs},     {"patience", c.patience},
          {"seed", c.seed},                 {"epoch_windows", c.epoch_windows},
          {"val_windows", c.val_windows}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.eps = j.value("eps", c.eps);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.seed = j.value("seed", c.seed);
  c.epoch_windows = j.value("epoch_windows", c.epoch_windows);
  c.val_windows = j.value("val_windows", c.val_windows);
  c.validate();
  return c;
}

json to_json(const dataio::FeatureSchema& s) {
  return {{"features", s.feature_names}, {"target", s.target_name},
          {"step_minutes", s.step_minutes}};
}

dataio::FeatureSchema schema_from_json(const json& j) {
  dataio::FeatureSchema s;
  s.feature_names = j.at("features").get<std::vector<std::string>>();
  s.target_name = j.at("target").get<std::string>();
  s.step_minutes = j.value("step_minutes", 15);
  s.validate();
  return s;
}

json to_json(const dataio::Normalizer& n) {
  return {{"schema", to_json(n.schema())},
          {"mean", n.mean()},
          {"std", n.stddev()},
          {"fitted_on", n.fitted_on()}};
}

dataio::Normalizer normalizer_from_json(const json& j) {
  return dataio::Normalizer(schema_from_json(j.at("schema")),
                            j.at("mean").get<std::vector<double>>(),
                            j.at("std").get<std::vector<double>>(),
                            j.at("fitted_on").get<std::uint64_t>());
}

void ModelCheckpoint::validate() const {
  const auto net = make_network(spec);
  if (params.size() != net->param_count())
    throw ShapeError("checkpoint: " + std::to_string(params.size()) +
                     " parameters, spec needs " + std::to_string(net->param_count()));
  for (double p : params)
    if (!std::isfinite(p)) throw DivergenceError("checkpoint: non-finite parameter");
  if (normalizer.mean().size() != spec.input_features)
    throw ShapeError("checkpoint: normalizer width does not match input_features");
}

json to_json(const ModelCheckpoint& c) {
  c.validate();
  const auto net = make_network(c.spec);
  json slices = json::array();
  for (const auto& s : net->layout().slices()) {
    std::vector<double> part(c.params.begin() + s.offset,
                             c.params.begin() + s.offset + s.size());
    slices.push_back({{"name", s.name},
                      {"rows", s.rows},
                      {"cols", s.cols},
                      {"f64le_base64", base64_encode_f64(part)}});
  }
  const auto& m = c.metadata;
  return {{"format", "msgm-checkpoint"},
          {"version", kCheckpointVersion},
          {"spec", to_json(c.spec)},
          {"normalizer", to_json(c.normalizer)},
          {"params", slices},
          {"metadata",
           {{"seed", m.seed},
            {"epochs_run", m.epochs_run},
            {"best_epoch", m.best_epoch},
            {"best_val_rmse", m.best_val_rmse},
            {"source_ids_hash", m.source_ids_hash},
            {"n_sources", m.n_sources}}}};
}

ModelCheckpoint checkpoint_from_json(const json& j) {
  ModelCheckpoint c;
  try {
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw DataError(DataErrorKind::kMalformed,
                      "checkpoint: unsupported version " + std::to_string(version));
    c.spec = model_spec_from_json(j.at("spec"));
    c.normalizer = normalizer_from_json(j.at("normalizer"));
    const auto net = make_network(c.spec);
    c.params.assign(net->param_count(), 0.0);
    std::vector<bool> seen(net->layout().slices().size(), false);
    for (const auto& item : j.at("params")) {
      const auto name = item.at("name").get<std::string>();
      const auto& s = net->layout().find(name);
      const auto data = base64_decode_f64(item.at("f64le_base64").get<std::string>());
      if (data.size() != s.size() || item.at("rows").get<std::size_t>() != s.rows ||
          item.at("cols").get<std::size_t>() != s.cols)
        throw ShapeError("checkpoint: slice '" + name + "' has the wrong shape");
      std::copy(data.begin(), data.end(), c.params.begin() + s.offset);
      seen[&s - net->layout().slices().data()] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i])
        throw ShapeError("checkpoint: missing slice '" + net->layout().slices()[i].name + "'");
    const auto& m = j.at("metadata");
    c.metadata.seed = m.at("seed").get<std::uint64_t>();
    c.metadata.epochs_run = m.at("epochs_run").get<std::size_t>();
    c.metadata.best_epoch = m.at("best_epoch").get<std::size_t>();
    c.metadata.best_val_rmse = m.at("best_val_rmse").get<double>();
    c.metadata.source_ids_hash = m.at("source_ids_hash").get<std::uint64_t>();
    c.metadata.n_sources = m.value("n_sources", std::size_t{0});
  } catch (const json::exception& e) {
    throw DataError(DataErrorKind::kMalformed, std::string("checkpoint: ") + e.what());
  }
  c.validate();
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& ckpt) {
  const json j = to_json(ckpt);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << j.dump() << "\n";
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(DataErrorKind::kMalformed,
                    "checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

void check_schema(const ModelCheckpoint& ckpt, const dataio::FeatureSchema& schema) {
  if (!(ckpt.schema() == schema))
    throw SchemaMismatch("schema does not match the checkpoint's training schema "
                         "(same-sensor rule)");
}

NormalizedBlock forward(const ModelCheckpoint& ckpt, const splitting::WindowBatch& batch) {
  if (const auto* s = batch.schema()) check_schema(ckpt, *s);
  const auto net = make_network(ckpt.spec);
  return forward_batch(*net, ckpt.params, batch);
}

}  // namespace msgm::neural
