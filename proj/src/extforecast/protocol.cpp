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

#include <cmath>

#include "msgm/error.hpp"
#include "msgm/extforecast.hpp"
#include "nlohmann/json.hpp"

namespace msgm::extforecast {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what, std::string_view line) {
  throw ProtocolError("protocol: " + what, std::string(line));
}

void check_request(const ForecastRequest& r, std::string_view line) {
  if (r.id.empty()) fail("empty id", line);
  if (r.horizon < 1) fail("horizon must be >= 1", line);
  if (r.step_minutes < 1) fail("step_minutes must be >= 1", line);
  if (r.feature_names.empty()) fail("no feature names", line);
  if (r.target_index >= r.feature_names.size()) fail("target_index out of range", line);
  if (r.context.empty()) fail("empty context", line);
  for (const auto& row : r.context) {
    if (row.size() != r.feature_names.size()) fail("context row width mismatch", line);
    for (double v : row)
      if (!std::isfinite(v)) fail("non-finite context value", line);
  }
}

json parse_object(std::string_view line) {
  if (line.find('\n') != std::string_view::npos) fail("embedded newline", line);
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) fail("malformed JSON", line);
  if (!j.is_object()) fail("expected a JSON object", line);
  return j;
}

}  // namespace

std::string encode(const ForecastRequest& r) {
  check_request(r, r.id);
  return json{{"id", r.id},
              {"feature_names", r.feature_names},
              {"context", r.context},
              {"target_index", r.target_index},
              {"horizon", r.horizon},
              {"step_minutes", r.step_minutes}}
      .dump();
}

std::string encode(const ForecastResponse& r) {
  for (double v : r.forecast)
    if (!std::isfinite(v)) fail("non-finite forecast", r.id);
  return json{{"id", r.id}, {"forecast", r.forecast}}.dump();
}

ForecastRequest decode_request(std::string_view line) {
  const json j = parse_object(line);
  ForecastRequest r;
  try {
    r.id = j.at("id").get<std::string>();
    r.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    r.context = j.at("context").get<std::vector<std::vector<double>>>();
    r.target_index = j.at("target_index").get<std::size_t>();
    r.horizon = j.at("horizon").get<std::size_t>();
    r.step_minutes = j.at("step_minutes").get<int>();
  } catch (const json::exception& e) {
    fail(std::string("bad request: ") + e.what(), line);
  }
  check_request(r, line);
  return r;
}

ForecastResponse decode_response(std::string_view line, std::size_t horizon) {
  const json j = parse_object(line);
  ForecastResponse r;
  try {
    r.id = j.at("id").get<std::string>();
    r.forecast = j.at("forecast").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(std::string("bad response: ") + e.what(), line);
  }
  if (horizon > 0 && r.forecast.size() != horizon)
    fail("forecast has " + std::to_string(r.forecast.size()) + " values, expected " +
             std::to_string(horizon),
         line);
  for (double v : r.forecast)
    if (!std::isfinite(v)) fail("non-finite forecast value", line);
  return r;
}

}  // namespace msgm::extforecast
