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

// Reference external forecaster: answers every request with the last
// observed target value repeated over the horizon.

#include <iostream>
#include <string>

#include "msgm/error.hpp"
#include "msgm/extforecast.hpp"

int main() {
  std::ios::sync_with_stdio(false);
  std::string line;
  while (std::getline(std::cin, line)) {
    try {
      const auto req = msgm::extforecast::decode_request(line);
      msgm::extforecast::ForecastResponse resp;
      resp.id = req.id;
      resp.forecast.assign(req.horizon, req.context.back()[req.target_index]);
      std::cout << msgm::extforecast::encode(resp) << '\n' << std::flush;
    } catch (const msgm::Error& e) {
      std::cerr << "persistence_adapter: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
