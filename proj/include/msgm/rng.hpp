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
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace msgm {

// The standard distributions are implementation-defined, so every random
// draw in the project goes through these helpers on top of mt19937_64 to keep
// datasets and training runs reproducible across standard libraries.

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Mixes a base seed with a sequence of tags into a new seed.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> tags) noexcept;

std::uint64_t hash_string(std::string_view s) noexcept;

// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
inline double unit_from_bits(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform() { return unit_from_bits(engine_()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi);
  // Standard normal via Box-Muller; one draw per call, no caching.
  double normal();
  // Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Seeded uniform permutation of [0, n).
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);

// Samples k distinct indices from [0, n) in ascending order.
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t k,
                                                    std::uint64_t seed);

}  // namespace msgm
