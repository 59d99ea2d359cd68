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

// Line-delimited JSON protocol for out-of-process forecasters. The harness
// writes one request per line to the program's stdin and reads one response
// per line from its stdout. Values are in physical units.

#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "msgm/dataio.hpp"
#include "msgm/evaluation.hpp"

namespace msgm::extforecast {

struct ForecastRequest {
  std::string id;
  std::vector<std::string> feature_names;   // every context column, target included
  std::vector<std::vector<double>> context;  // [L][C]
  std::size_t target_index = 0;
  std::size_t horizon = 4;
  int step_minutes = 15;

  bool operator==(const ForecastRequest&) const = default;
};

struct ForecastResponse {
  std::string id;
  std::vector<double> forecast;

  bool operator==(const ForecastResponse&) const = default;
};

// One JSON object, no trailing newline. Throws ProtocolError for a request
// that violates its invariants.
std::string encode(const ForecastRequest& request);
std::string encode(const ForecastResponse& response);

// Throw ProtocolError carrying the offending line.
ForecastRequest decode_request(std::string_view line);
// `horizon` > 0 also checks the forecast length.
ForecastResponse decode_response(std::string_view line, std::size_t horizon = 0);

// A child process speaking the protocol on its standard streams.
class AdapterProcess {
 public:
  explicit AdapterProcess(std::vector<std::string> command);
  ~AdapterProcess();
  AdapterProcess(const AdapterProcess&) = delete;
  AdapterProcess& operator=(const AdapterProcess&) = delete;

  // Sends one line and waits up to `timeout` for one line back. Throws
  // AdapterTimeout or AdapterExited.
  std::string round_trip(const std::string& line, std::chrono::milliseconds timeout);
  // Closes stdin and reaps the child; returns its exit status (or 128 + signal).
  int finish();

 private:
  void kill_child();

  std::vector<std::string> command_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

struct AdapterOptions {
  std::vector<std::string> command;
  std::chrono::milliseconds timeout{30000};
};

// Scores the program on every evaluation window of each target, in target
// order and ascending window start. Seasonal mode uses the test ranges of the
// seasonal plan; all-in-one windows the whole series. Errors carry the
// window provenance ("building:start").
std::vector<evaluation::BuildingReport> run_adapter(
    const AdapterOptions& options, const std::vector<const dataio::SeriesFrame*>& targets,
    evaluation::EvalMode mode);

// The request for the window starting at `start` of a frame.
ForecastRequest make_request(const dataio::SeriesFrame& frame, std::size_t start,
                             std::size_t lookback, std::size_t horizon);

}  // namespace msgm::extforecast
