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

// Misbehaving and oracle forecasters for adapter tests.
//   fixture_adapter persistence
//   fixture_adapter truth <dataset_dir>   answers with the real future values
//   fixture_adapter wrong-id | wrong-length | garbage
//   fixture_adapter sleep <ms>            never answers within <ms>
//   fixture_adapter exit-nonzero          exits with status 3 on the first request

#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include "msgm/dataio.hpp"
#include "msgm/extforecast.hpp"

using msgm::extforecast::ForecastResponse;

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: fixture_adapter <mode> [arg]\n";
    return 2;
  }
  const std::string mode = argv[1];
  msgm::dataio::Dataset ds;
  if (mode == "truth") ds = msgm::dataio::load_dataset(argv[2]);

  std::string line;
  while (std::getline(std::cin, line)) {
    const auto req = msgm::extforecast::decode_request(line);
    ForecastResponse resp;
    resp.id = req.id;
    resp.forecast.assign(req.horizon, req.context.back()[req.target_index]);
    if (mode == "truth") {
      const auto colon = req.id.rfind(':');
      const auto& frame = ds.frame(req.id.substr(0, colon));
      const std::size_t start = std::stoul(req.id.substr(colon + 1));
      for (std::size_t j = 0; j < req.horizon; ++j)
        resp.forecast[j] = frame.target(start + req.context.size() + j);
    } else if (mode == "wrong-id") {
      resp.id += "x";
    } else if (mode == "wrong-length") {
      resp.forecast.push_back(0.0);
    } else if (mode == "garbage") {
      std::cout << "not json\n" << std::flush;
      continue;
    } else if (mode == "sleep") {
      std::this_thread::sleep_for(std::chrono::milliseconds(std::stol(argv[2])));
    } else if (mode == "exit-nonzero") {
      return 3;
    }
    std::cout << msgm::extforecast::encode(resp) << '\n' << std::flush;
  }
  return 0;
}
