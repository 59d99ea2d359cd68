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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "msgm/dataio.hpp"
#include "msgm/error.hpp"
#include "msgm/rng.hpp"

namespace msgm::dataio {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::path(testing::TempDir()) / ("msgm_dataio_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

FeatureSchema small_schema() { return {{"a", "b"}, "y", 15}; }

SeriesFrame make_frame(std::string id, std::size_t rows, std::uint64_t seed,
                       int step_minutes = 15) {
  Rng rng(seed);
  std::vector<UtcSeconds> ts;
  std::vector<double> v;
  for (std::size_t r = 0; r < rows; ++r) {
    ts.push_back(utc_from_civil(2023, 1, 1) + static_cast<UtcSeconds>(r) * step_minutes * 60);
    for (int c = 0; c < 3; ++c) v.push_back(rng.normal() * 3.0 + c);
  }
  return SeriesFrame(std::move(id), "R0", small_schema().with_step(step_minutes),
                     std::move(ts), std::move(v));
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

TEST(FeatureSchema, Validation) {
  EXPECT_NO_THROW(small_schema().validate());
  EXPECT_THROW((FeatureSchema{{"a", "a"}, "y", 15}.validate()), InvalidArgument);
  EXPECT_THROW((FeatureSchema{{"a", "y"}, "y", 15}.validate()), InvalidArgument);
  EXPECT_THROW((FeatureSchema{{"a", ""}, "y", 15}.validate()), InvalidArgument);
  EXPECT_THROW((FeatureSchema{{"a"}, "", 15}.validate()), InvalidArgument);
  const auto d = FeatureSchema::building_default();
  EXPECT_EQ(d.columns(), (std::vector<std::string>{"setpoint_c", "heating_power_w", "wind_ms",
                                                   "t_out_c", "solar_wm2", "t_in_c"}));
}

TEST(SeriesFrame, RejectsBrokenInvariants) {
  const auto s = small_schema();
  EXPECT_THROW(SeriesFrame("x", "", s, {0, 900}, {1, 2, NAN, 4, 5, 6}), DataError);
  EXPECT_THROW(SeriesFrame("x", "", s, {900, 0}, {1, 2, 3, 4, 5, 6}), DataError);
  EXPECT_THROW(SeriesFrame("x", "", s, {0, 900, 2700}, std::vector<double>(9, 1.0)), DataError);
  EXPECT_THROW(SeriesFrame("x", "", s, {0, 900}, {1, 2, 3, 4, 5}), std::exception);
}

TEST(Csv, WellFormedFile) {
  const auto dir = temp_dir("ok");
  const auto frame = make_frame("b1", 96, 1);
  write_series_csv(dir / "b1.csv", frame);
  const auto back = read_series_csv(dir / "b1.csv", small_schema());
  EXPECT_EQ(back.rows(), 96u);
  EXPECT_EQ(back.building_id(), "b1");
  EXPECT_EQ(back.step_seconds(), 900);
}

TEST(Csv, RoundTripPreservesValues) {
  const auto dir = temp_dir("rt");
  const auto frame = make_frame("b2", 500, 2);
  write_series_csv(dir / "b2.csv", frame);
  const auto back = read_series_csv(dir / "b2.csv", small_schema());
  ASSERT_EQ(back.rows(), frame.rows());
  for (std::size_t i = 0; i < frame.values().size(); ++i)
    EXPECT_NEAR(back.values()[i], frame.values()[i], 1e-9 * std::abs(frame.values()[i]));
  EXPECT_EQ(back.timestamps(), frame.timestamps());
}

TEST(Csv, NanCellNamesRow) {
  const auto dir = temp_dir("nan");
  write_text(dir / "f.csv",
             "timestamp,a,b,y\n"
             "2023-01-01T00:00:00Z,1,2,3\n"
             "2023-01-01T00:15:00Z,1,NaN,3\n");
  try {
    read_series_csv(dir / "f.csv", small_schema());
    FAIL() << "expected NonFiniteValue";
  } catch (const DataError& e) {
    EXPECT_EQ(e.kind(), DataErrorKind::kNonFiniteValue);
    EXPECT_EQ(e.row(), 1u);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(Csv, EmptyCellIsNonFinite) {
  const auto dir = temp_dir("empty");
  write_text(dir / "f.csv", "timestamp,a,b,y\n2023-01-01T00:00:00Z,1,,3\n");
  try {
    read_series_csv(dir / "f.csv", small_schema());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.kind(), DataErrorKind::kNonFiniteValue);
  }
}

TEST(Csv, ShuffledColumnOrderGivesSameFrame) {
  const auto dir = temp_dir("shuffle");
  write_text(dir / "canon.csv",
             "timestamp,a,b,y\n"
             "2023-01-01T00:00:00Z,1,2,3\n"
             "2023-01-01T00:15:00Z,4,5,6\n");
  write_text(dir / "shuf.csv",
             "y,timestamp,b,extra,a\n"
             "3,2023-01-01T00:00:00Z,2,9,1\n"
             "6,2023-01-01T00:15:00Z,5,9,4\n");
  const auto a = read_series_csv(dir / "canon.csv", small_schema(), "x");
  const auto b = read_series_csv(dir / "shuf.csv", small_schema(), "x");
  EXPECT_EQ(std::vector<double>(a.values().begin(), a.values().end()),
            std::vector<double>(b.values().begin(), b.values().end()));
  EXPECT_EQ(a.timestamps(), b.timestamps());
}

TEST(Csv, ErrorKinds) {
  const auto dir = temp_dir("kinds");
  const auto kind_of = [&](const std::string& body) {
    write_text(dir / "f.csv", body);
    try {
      read_series_csv(dir / "f.csv", small_schema());
    } catch (const DataError& e) {
      return e.kind();
    }
    return DataErrorKind::kMalformed;
  };
  EXPECT_EQ(kind_of("timestamp,a,y\n2023-01-01T00:00:00Z,1,3\n"), DataErrorKind::kMissingColumn);
  EXPECT_EQ(kind_of("timestamp,a,b,y\n2023-01-01T00:15:00Z,1,2,3\n2023-01-01T00:00:00Z,1,2,3\n"),
            DataErrorKind::kNonMonotoneTimestamps);
  EXPECT_EQ(kind_of("timestamp,a,b,y\n2023-01-01T00:00:00Z,1,2,3\n2023-01-01T00:15:00Z,1,2,3\n"
                    "2023-01-01T00:45:00Z,1,2,3\n"),
            DataErrorKind::kIrregularStep);
  EXPECT_THROW(read_series_csv(dir / "nope.csv", small_schema()), IoError);
}

TEST(Resample, FifteenMinuteInputIsIdentity) {
  const auto f = make_frame("r", 40, 3);
  const auto g = resample_15min(f);
  EXPECT_EQ(g.timestamps(), f.timestamps());
  EXPECT_EQ(std::vector<double>(g.values().begin(), g.values().end()),
            std::vector<double>(f.values().begin(), f.values().end()));
}

TEST(Resample, ConstantColumnsStayConstant) {
  std::vector<UtcSeconds> ts;
  std::vector<double> v;
  for (int r = 0; r < 150; ++r) {
    ts.push_back(r * 60);
    v.insert(v.end(), {0.1, 2.7, 21.3});
  }
  const auto g = resample_15min(SeriesFrame("c", "", small_schema().with_step(1), ts, v));
  ASSERT_EQ(g.rows(), 10u);
  EXPECT_EQ(g.step_seconds(), 900);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    EXPECT_EQ(g.value(r, 0), 0.1);
    EXPECT_EQ(g.value(r, 1), 2.7);
    EXPECT_EQ(g.value(r, 2), 21.3);
  }
}

TEST(Resample, PiecewiseConstantBins) {
  std::vector<UtcSeconds> ts;
  std::vector<double> v;
  for (int r = 0; r < 30; ++r) {
    ts.push_back(r * 60);
    v.insert(v.end(), {0, 0, r < 15 ? 20.0 : 23.0});
  }
  const auto g = resample_15min(SeriesFrame("c", "", small_schema().with_step(1), ts, v));
  ASSERT_EQ(g.rows(), 2u);
  EXPECT_EQ(g.target(0), 20.0);
  EXPECT_EQ(g.target(1), 23.0);
  EXPECT_EQ(g.timestamps()[1] - g.timestamps()[0], 900);
}

TEST(Resample, BinMeanAndPartialBinDropped) {
  std::vector<UtcSeconds> ts;
  std::vector<double> v;
  for (int r = 0; r < 7; ++r) {
    ts.push_back(r * 300);
    v.insert(v.end(), {double(r), 0, 0});
  }
  const auto g = resample_15min(SeriesFrame("c", "", small_schema().with_step(5), ts, v));
  ASSERT_EQ(g.rows(), 2u);
  EXPECT_DOUBLE_EQ(g.value(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(g.value(1, 0), 4.0);
}

TEST(Resample, RejectsStepNotDividing15) {
  std::vector<UtcSeconds> ts{0, 420, 840};
  const auto f = SeriesFrame("c", "", small_schema().with_step(7), ts, std::vector<double>(9, 1.0));
  EXPECT_THROW(resample_15min(f), DataError);
}

TEST(Normalizer, HandComputedTwoValueColumn) {
  const auto s = small_schema();
  const SeriesFrame f("n", "", s, {0, 900}, {0, 5, 1, 2, 5, 3});
  const auto n = Normalizer::fit(std::vector<SeriesFrame>{f});
  EXPECT_DOUBLE_EQ(n.mean()[0], 1.0);
  EXPECT_DOUBLE_EQ(n.stddev()[0], 1.0);
  // Constant column: std forced to 1, values all 0.
  EXPECT_DOUBLE_EQ(n.mean()[1], 5.0);
  EXPECT_DOUBLE_EQ(n.stddev()[1], 1.0);
  const auto z = n.apply(f);
  EXPECT_DOUBLE_EQ(z->value(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(z->value(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(z->value(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(z->value(1, 1), 0.0);
}

TEST(Normalizer, InvertTargetRoundTrip) {
  const auto f = make_frame("a", 300, 5);
  const auto n = Normalizer::fit(std::vector<SeriesFrame>{f});
  const auto z = n.apply(f);
  for (std::size_t r = 0; r < f.rows(); ++r)
    EXPECT_NEAR(n.invert_target(z->value(r, 2)), f.target(r), 1e-12 * std::abs(f.target(r)));
}

TEST(Normalizer, IndependentOfFrameOrder) {
  const auto a = make_frame("a", 100, 6), b = make_frame("b", 57, 7), c = make_frame("c", 80, 8);
  const auto n1 = Normalizer::fit(std::vector<SeriesFrame>{a, b, c});
  const auto n2 = Normalizer::fit(std::vector<SeriesFrame>{c, a, b});
  EXPECT_EQ(n1, n2);
}

TEST(Normalizer, EmptyListRejected) {
  EXPECT_THROW(Normalizer::fit(std::vector<SeriesFrame>{}), InvalidArgument);
}

TEST(Normalizer, FitRowsUsesOnlyRange) {
  const auto f = make_frame("a", 100, 9);
  const auto n = Normalizer::fit_rows(f, 0, 50);
  double m = 0;
  for (std::size_t r = 0; r < 50; ++r) m += f.value(r, 0);
  EXPECT_NEAR(n.mean()[0], m / 50, 1e-12);
}

TEST(Manifest, RoundTrip) {
  const auto dir = temp_dir("manifest");
  DatasetManifest m;
  m.schema = FeatureSchema::building_default();
  m.buildings = {{"B000", "R0", "B000.csv"}, {"B001", "R1", "B001.csv"}};
  m.global_seed = 42;
  m.days = 3;
  write_manifest(dir / "manifest.json", m);
  const auto back = read_manifest(dir / "manifest.json");
  EXPECT_EQ(back.buildings, m.buildings);
  EXPECT_EQ(back.schema, m.schema);
  EXPECT_EQ(back.global_seed, 42u);
  EXPECT_EQ(back.days, 3);
  EXPECT_EQ(back.step_minutes, 15);
}

TEST(Manifest, HashIdsIsOrderInsensitive) {
  EXPECT_EQ(hash_ids({"a", "b", "c"}), hash_ids({"c", "a", "b"}));
  EXPECT_NE(hash_ids({"a", "b"}), hash_ids({"a", "c"}));
}

}  // namespace
}  // namespace msgm::dataio
