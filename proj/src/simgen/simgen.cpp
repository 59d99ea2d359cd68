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

#include "msgm/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "msgm/error.hpp"
#include "msgm/rng.hpp"

namespace msgm::simgen {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDaysPerYear = 365.0;
// Daily mean of max(0, sin(pi (h - 6) / 12)) over 24 h.
constexpr double kDailyMeanSolarFraction = 1.0 / std::numbers::pi;

// Seed tags, so that independent draws never share a stream.
enum : std::uint64_t {
  kTagParams = 1,
  kTagSchedule = 2,
  kTagGains = 3,
  kTagWeather = 4,
  kTagClimate = 5,
};

}  // namespace

void BuildingParams::validate() const {
  if (!(c_in > 0 && c_env > 0 && r1 > 0 && r2 > 0 && solar_aperture > 0 &&
        heater_power > 0))
    throw InvalidArgument("building params: physical quantities must be positive");
  if (!(wind_coeff >= 0)) throw InvalidArgument("building params: wind_coeff < 0");
  if (heater_power > 2e4) throw InvalidArgument("building params: heater_power > 20 kW");
}

BuildingParams sample_building_params(std::uint64_t archetype_seed,
                                      std::uint64_t global_seed) {
  using R = ParamRanges;
  Rng rng(derive_seed(global_seed, {kTagParams, archetype_seed}));
  BuildingParams p;
  p.seed = archetype_seed;
  p.c_in = rng.log_uniform(R::kCInMin, R::kCInMax);
  p.c_env = rng.log_uniform(R::kCEnvMin, R::kCEnvMax);
  p.r1 = rng.log_uniform(R::kR1Min, R::kR1Max);
  p.r2 = rng.log_uniform(R::kR2Min, R::kR2Max);
  p.wind_coeff = rng.uniform(R::kWindMin, R::kWindMax);
  const double mean_solar = 800.0 * kDailyMeanSolarFraction;
  const double aperture_cap =
      std::clamp(R::kMaxPassiveSolarLift / (mean_solar * (p.r1 + p.r2)),
                 R::kApertureMin, R::kApertureMax);
  p.solar_aperture = rng.log_uniform(R::kApertureMin, aperture_cap);
  p.heater_power = rng.log_uniform(R::kHeaterMin, R::kHeaterMax);
  return p;
}

double solar_irradiance(double hour, int doy, double solar_max) {
  const double elevation = std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
  if (elevation <= 0.0) return 0.0;
  // 0.3 at the coldest day, 1.0 half a year later.
  const double seasonal = 0.65 - 0.35 * std::cos(kTwoPi * (doy - 15.0) / kDaysPerYear);
  return solar_max * elevation * seasonal;
}

WeatherSeries synth_weather(std::uint64_t seed, UtcSeconds start, int days,
                            std::int64_t step_seconds,
                            const WeatherClimate& climate) {
  if (days < 1) throw InvalidArgument("synth_weather: days must be >= 1");
  if (step_seconds <= 0 || kSecondsPerDay % step_seconds != 0)
    throw InvalidArgument("synth_weather: step must divide one day");

  const std::size_t n =
      static_cast<std::size_t>(days) * static_cast<std::size_t>(kSecondsPerDay / step_seconds);
  WeatherSeries w;
  w.step_seconds = step_seconds;
  w.timestamps.resize(n);
  w.t_out.resize(n);
  w.solar.resize(n);
  w.wind.resize(n);

  Rng rng(derive_seed(seed, {kTagWeather}));
  double temp_noise = 0.0;
  double wind_dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const UtcSeconds t = start + static_cast<UtcSeconds>(i) * step_seconds;
    const double hour = hour_of_day(t);
    const int doy = day_of_year(t);
    const double day_frac = doy + hour / 24.0;

    temp_noise = climate.noise_ar * temp_noise + climate.noise_std_k * rng.normal();
    wind_dev = climate.wind_ar * wind_dev + climate.wind_std * rng.normal();

    w.timestamps[i] = t;
    w.t_out[i] = climate.mean_c -
                 climate.annual_amplitude_k *
                     std::cos(kTwoPi * (day_frac - climate.coldest_day) / kDaysPerYear) -
                 climate.daily_amplitude_k *
                     std::cos(kTwoPi * (hour - climate.coldest_hour) / 24.0) +
                 temp_noise;
    w.solar[i] = solar_irradiance(hour, doy, climate.solar_max);
    w.wind[i] = std::abs(climate.wind_mean + wind_dev);
  }
  return w;
}

void ThermostatSchedule::validate() const {
  if (night_setpoint > day_setpoint)
    throw InvalidArgument("thermostat: night setpoint above day setpoint");
  if (!(hysteresis_band > 0)) throw InvalidArgument("thermostat: band must be > 0");
}

double ThermostatSchedule::setpoint_at(double hour) const {
  return (hour >= day_start && hour < day_end) ? day_setpoint : night_setpoint;
}

void OccupancyGains::validate() const {
  if (base_gain < 0 || occupied_gain < 0)
    throw InvalidArgument("occupancy: gains must be >= 0");
}

double OccupancyGains::at(double hour) const {
  const int h = std::clamp(static_cast<int>(hour), 0, 23);
  return base_gain + (occupied_hours[h] ? occupied_gain : 0.0);
}

ThermostatSchedule sample_schedule(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {kTagSchedule}));
  ThermostatSchedule s;
  s.day_setpoint = rng.uniform(20.0, 22.0);
  s.night_setpoint = std::min(s.day_setpoint, rng.uniform(16.0, 19.0));
  s.day_start = std::round(rng.uniform(5.0, 8.0) * 4.0) / 4.0;
  s.day_end = std::round(rng.uniform(21.0, 23.5) * 4.0) / 4.0;
  return s;
}

OccupancyGains sample_gains(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {kTagGains}));
  OccupancyGains g;
  g.base_gain = rng.uniform(50.0, 150.0);
  g.occupied_gain = rng.uniform(100.0, 300.0);
  const bool home_all_day = rng.uniform() < 0.3;
  const int wake = 6 + static_cast<int>(rng.below(3)) - 1;
  const int leave = wake + 2;
  const int back = 17 + static_cast<int>(rng.below(3)) - 1;
  const int sleep = 22 + static_cast<int>(rng.below(2));
  for (int h = 0; h < 24; ++h) {
    const bool morning = h >= wake && h < leave;
    const bool evening = h >= back && h < sleep;
    const bool day = home_all_day && h >= leave && h < back;
    g.occupied_hours[h] = morning || evening || day;
  }
  return g;
}

dataio::SeriesFrame simulate_building(const BuildingParams& p,
                                      const WeatherSeries& weather,
                                      const ThermostatSchedule& schedule,
                                      const OccupancyGains& gains,
                                      const SimulationOptions& options,
                                      std::string building_id, std::string region) {
  p.validate();
  schedule.validate();
  gains.validate();
  const std::int64_t dt_s = options.substep_seconds;
  if (dt_s <= 0 || weather.step_seconds <= 0 || weather.step_seconds % dt_s != 0)
    throw InvalidArgument("simulate: substep must divide the weather step");
  if (weather.size() == 0) throw InvalidArgument("simulate: empty weather");

  const std::size_t per_sample = static_cast<std::size_t>(weather.step_seconds / dt_s);
  const std::size_t steps = weather.size() * per_sample;
  const double dt = static_cast<double>(dt_s);
  const auto schema = dataio::FeatureSchema::building_default().with_step(
      static_cast<int>(std::max<std::int64_t>(1, dt_s / 60)));
  const std::size_t C = schema.n_columns();

  std::vector<UtcSeconds> ts(steps);
  std::vector<double> values(steps * C);

  const UtcSeconds t0 = weather.timestamps.front();
  double t_in = options.initial_t_in.value_or(schedule.setpoint_at(hour_of_day(t0)));
  double t_env = options.initial_t_env.value_or(t_in);
  bool heater_on = false;

  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t wi = k / per_sample;
    const UtcSeconds t = t0 + static_cast<UtcSeconds>(k) * dt_s;
    const double hour = hour_of_day(t);
    const double t_out = weather.t_out[wi];
    const double solar = weather.solar[wi];
    const double wind = weather.wind[wi];
    const double setpoint = schedule.setpoint_at(hour);

    double q_heat;
    if (options.forced_heating_w) {
      q_heat = *options.forced_heating_w;
    } else {
      if (heater_on && t_in >= setpoint + schedule.hysteresis_band) heater_on = false;
      else if (!heater_on && t_in <= setpoint - schedule.hysteresis_band) heater_on = true;
      q_heat = heater_on ? p.heater_power : 0.0;
    }

    ts[k] = t;
    double* row = &values[k * C];
    row[0] = setpoint;
    row[1] = q_heat;
    row[2] = wind;
    row[3] = t_out;
    row[4] = solar;
    row[5] = t_in;

    const double r2_eff = p.r2 / (1.0 + p.wind_coeff * wind);
    const double flow_in_env = (t_env - t_in) / p.r1;
    const double d_in =
        dt / p.c_in * (flow_in_env + q_heat + p.solar_aperture * solar + gains.at(hour));
    const double d_env = dt / p.c_env * (-flow_in_env + (t_out - t_env) / r2_eff);
    t_in += d_in;
    t_env += d_env;
    if (!std::isfinite(t_in) || !std::isfinite(t_env)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "simulate '%s': non-finite state at substep %zu (T_in=%g, T_env=%g)",
                    building_id.c_str(), k, t_in, t_env);
      throw DivergenceError(buf);
    }
  }
  return dataio::SeriesFrame(std::move(building_id), std::move(region), schema,
                             std::move(ts), std::move(values));
}

WeatherClimate region_climate(int region, std::uint64_t global_seed) {
  Rng rng(derive_seed(global_seed, {kTagClimate, static_cast<std::uint64_t>(region)}));
  WeatherClimate c;
  c.mean_c += rng.uniform(-3.0, 3.0);
  c.coldest_day += rng.uniform(-10.0, 10.0);
  return c;
}

dataio::DatasetManifest generate_dataset(int n_buildings, int days,
                                         std::uint64_t global_seed,
                                         const std::filesystem::path& out_dir,
                                         const GenerateOptions& options) {
  if (n_buildings < 1) throw InvalidArgument("generate: n_buildings must be >= 1");
  if (days < 1) throw InvalidArgument("generate: days must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw IoError("generate: cannot create " + out_dir.string());

  const int spin = std::max(0, options.spinup_days);
  const UtcSeconds sim_start = options.start - spin * kSecondsPerDay;
  std::vector<WeatherSeries> weather(kRegionCount);
  for (int r = 0; r < kRegionCount; ++r)
    weather[r] = synth_weather(
        derive_seed(global_seed, {kTagWeather, static_cast<std::uint64_t>(r)}),
        sim_start, days + spin, 15 * 60, region_climate(r, global_seed));

  dataio::DatasetManifest manifest;
  manifest.schema = dataio::FeatureSchema::building_default();
  manifest.step_minutes = 15;
  manifest.global_seed = global_seed;
  manifest.days = days;
  const int width = n_buildings > 1000 ? 5 : 3;
  for (int i = 0; i < n_buildings; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "B%0*d", width, i);
    manifest.buildings.push_back(
        {id, "R" + std::to_string(i % kRegionCount), std::string(id) + ".csv"});
  }

  const std::size_t skip = static_cast<std::size_t>(spin) * 96;
  std::vector<std::string> failures(n_buildings);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, options.jobs))
  for (int i = 0; i < n_buildings; ++i) {
    try {
      const auto& entry = manifest.buildings[i];
      const auto idx = static_cast<std::uint64_t>(i);
      const auto params = sample_building_params(idx, global_seed);
      const auto sched = sample_schedule(derive_seed(global_seed, {kTagSchedule, idx}));
      const auto gains = sample_gains(derive_seed(global_seed, {kTagGains, idx}));
      auto fine = simulate_building(params, weather[i % kRegionCount], sched, gains, {},
                                    entry.id, entry.region);
      auto coarse = dataio::resample_15min(fine);
      std::vector<UtcSeconds> ts(coarse.timestamps().begin() + skip,
                                 coarse.timestamps().end());
      auto vals = coarse.values();
      std::vector<double> v(vals.begin() + skip * coarse.cols(), vals.end());
      dataio::SeriesFrame out(entry.id, entry.region, coarse.schema(), std::move(ts),
                              std::move(v));
      dataio::write_series_csv(out_dir / entry.file, out);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  }
  for (const auto& f : failures)
    if (!f.empty()) throw IoError("generate: " + f);
  dataio::write_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace msgm::simgen
