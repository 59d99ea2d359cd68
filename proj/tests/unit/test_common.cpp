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

#include <algorithm>
#include <numeric>
#include <set>

#include "msgm/rng.hpp"
#include "msgm/time.hpp"

namespace msgm {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, LogUniformStaysInRange) {
  Rng r(2);
  for (int i = 0; i < 10000; ++i) {
    const double v = r.log_uniform(5e6, 5e7);
    ASSERT_GE(v, 5e6);
    ASSERT_LE(v, 5e7);
  }
}

TEST(Rng, NormalMoments) {
  Rng r(3);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, BelowCoversRangeUniformly) {
  Rng r(4);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[r.below(7)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(Rng, PermutationIsBijection) {
  auto p = permutation(1000, 9);
  std::vector<std::size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_EQ(p, permutation(1000, 9));
  EXPECT_NE(p, permutation(1000, 10));
}

TEST(Rng, SampleWithoutReplacementSortedDistinct) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = sample_without_replacement(50, 17, seed);
    ASSERT_EQ(s.size(), 17u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 17u);
    EXPECT_LT(s.back(), 50u);
  }
}

TEST(Rng, DeriveSeedSeparatesTags) {
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
  EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
}

TEST(Time, FormatParseRoundTrip) {
  const UtcSeconds t = utc_from_civil(2023, 3, 14, 15, 9, 26);
  EXPECT_EQ(format_iso8601(t), "2023-03-14T15:09:26Z");
  EXPECT_EQ(parse_iso8601("2023-03-14T15:09:26Z"), t);
  EXPECT_EQ(parse_iso8601("2023-03-14T15:09:26"), t);
  EXPECT_EQ(parse_iso8601("2023-03-14T15:09:26+00:00"), t);
}

TEST(Time, RejectsMalformed) {
  EXPECT_FALSE(parse_iso8601("2023-13-01T00:00:00Z"));
  EXPECT_FALSE(parse_iso8601("2023-03-14 15:09:26"));
  EXPECT_FALSE(parse_iso8601("yesterday"));
  EXPECT_FALSE(parse_iso8601("2023-02-30T00:00:00Z"));
}

TEST(Time, DayOfYearAndHour) {
  EXPECT_EQ(day_of_year(utc_from_civil(2023, 1, 1)), 0);
  EXPECT_EQ(day_of_year(utc_from_civil(2023, 12, 31)), 364);
  EXPECT_DOUBLE_EQ(hour_of_day(utc_from_civil(2023, 5, 5, 6, 30)), 6.5);
  EXPECT_EQ(utc_from_civil(1970, 1, 1), 0);
}

}  // namespace
}  // namespace msgm
