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

#include <chrono>
#include <filesystem>

#include "msgm/error.hpp"
#include "msgm/evaluation.hpp"
#include "msgm/extforecast.hpp"
#include "msgm/simgen.hpp"

namespace msgm::extforecast {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

ForecastRequest sample_request() {
  ForecastRequest r;
  r.id = "B000:17";
  r.feature_names = {"a", "t"};
  r.context = {{1.0, 20.5}, {2.0, 20.25}, {0.1, 1.0 / 3.0}};
  r.target_index = 1;
  r.horizon = 4;
  return r;
}

// Two buildings, two days; generated once for the suite.
class AdapterRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::path(testing::TempDir()) / "msgm_adapter_ds";
    fs::remove_all(dir_);
    simgen::generate_dataset(2, 2, 11, dir_);
    ds_ = new dataio::Dataset(dataio::load_dataset(dir_));
  }
  static void TearDownTestSuite() { delete ds_; }

  std::vector<const dataio::SeriesFrame*> targets() const {
    return {&ds_->frames[0], &ds_->frames[1]};
  }
  static AdapterOptions fixture(std::vector<std::string> args) {
    AdapterOptions o;
    o.command = {MSGM_FIXTURE_ADAPTER};
    o.command.insert(o.command.end(), args.begin(), args.end());
    o.timeout = 5000ms;
    return o;
  }

  static inline fs::path dir_;
  static inline dataio::Dataset* ds_ = nullptr;
};

TEST(Protocol, RequestRoundTrip) {
  const auto r = sample_request();
  const auto line = encode(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(decode_request(line), r);
}

TEST(Protocol, ResponseRoundTrip) {
  const ForecastResponse r{"x:1", {20.0, 20.5, 1e-17, -3.25}};
  EXPECT_EQ(decode_response(encode(r), 4), r);
}

TEST(Protocol, RejectsBadLines) {
  try {
    decode_response("{}");
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.line(), "{}");
  }
  EXPECT_THROW(decode_response("not json"), ProtocolError);
  EXPECT_THROW(decode_response("[1,2]"), ProtocolError);
  EXPECT_THROW(decode_response(R"({"id":"a","forecast":[1,2,3]})", 4), ProtocolError);
  EXPECT_NO_THROW(decode_response(R"({"id":"a","forecast":[1,2,3]})"));
  EXPECT_THROW(decode_request(R"({"id":"a"})"), ProtocolError);
  auto r = sample_request();
  r.target_index = 5;
  EXPECT_THROW(encode(r), ProtocolError);
  r = sample_request();
  r.context[1].pop_back();
  EXPECT_THROW(encode(r), ProtocolError);
}

TEST_F(AdapterRun, MakeRequestCarriesPhysicalContext) {
  const auto& f = ds_->frames[0];
  const auto r = make_request(f, 10, 96, 4);
  EXPECT_EQ(r.id, f.building_id() + ":10");
  ASSERT_EQ(r.context.size(), 96u);
  EXPECT_EQ(r.target_index, f.target_column());
  EXPECT_EQ(r.feature_names, f.schema().columns());
  EXPECT_EQ(r.context[0][r.target_index], f.target(10));
  EXPECT_EQ(r.context[95][0], f.value(105, 0));
}

TEST_F(AdapterRun, TruthOracleScoresZero) {
  const auto reps = run_adapter(fixture({"truth", dir_.string()}), targets(),
                                evaluation::EvalMode::kAllInOne);
  ASSERT_EQ(reps.size(), 2u);
  for (const auto& r : reps) {
    EXPECT_EQ(r.overall.mae, 0.0);
    EXPECT_EQ(r.overall.n_windows, 192u - 100 + 1);
  }
}

TEST_F(AdapterRun, PersistenceMatchesHandComputation) {
  const auto reps = run_adapter(fixture({"persistence"}), targets(),
                                evaluation::EvalMode::kAllInOne);
  const auto& f = ds_->frames[0];
  double abs_sum = 0;
  std::size_t n = 0;
  for (std::size_t s = 0; s + 100 <= f.rows(); ++s)
    for (std::size_t j = 0; j < 4; ++j, ++n) abs_sum += std::abs(f.target(s + 96 + j) - f.target(s + 95));
  EXPECT_NEAR(reps[0].overall.mae, abs_sum / n, 1e-9);
}

TEST_F(AdapterRun, MisbehavingAdaptersRaise) {
  const auto t = targets();
  EXPECT_THROW(run_adapter(fixture({"wrong-id"}), t, evaluation::EvalMode::kAllInOne),
               ProtocolError);
  EXPECT_THROW(run_adapter(fixture({"wrong-length"}), t, evaluation::EvalMode::kAllInOne),
               ProtocolError);
  try {
    run_adapter(fixture({"garbage"}), t, evaluation::EvalMode::kAllInOne);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("[window " + ds_->frames[0].building_id() + ":0]"),
              std::string::npos);
    EXPECT_EQ(e.line(), "not json");
  }
  EXPECT_THROW(run_adapter(fixture({"exit-nonzero"}), t, evaluation::EvalMode::kAllInOne),
               AdapterExited);
  auto slow = fixture({"sleep", "2000"});
  slow.timeout = 200ms;
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(run_adapter(slow, t, evaluation::EvalMode::kAllInOne), AdapterTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 1500ms);
}

TEST_F(AdapterRun, SeasonalNeedsAYear) {
  EXPECT_THROW(run_adapter(fixture({"persistence"}), targets(), evaluation::EvalMode::kSeasonal),
               InvalidArgument);
}

TEST(Process, MissingProgramIsReportedAsExit) {
  AdapterProcess p({"/nonexistent/forecaster"});
  EXPECT_THROW(p.round_trip("{}", 2000ms), AdapterExited);
}

TEST(Process, RoundTripAndCleanExit) {
  AdapterProcess p({MSGM_PERSISTENCE_ADAPTER});
  const auto line = p.round_trip(encode(sample_request()), 5000ms);
  const auto resp = decode_response(line, 4);
  EXPECT_EQ(resp.id, "B000:17");
  for (double v : resp.forecast) EXPECT_EQ(v, 1.0 / 3.0);
  EXPECT_EQ(p.finish(), 0);
}

}  // namespace
}  // namespace msgm::extforecast
