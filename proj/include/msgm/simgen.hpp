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

// Synthetic building datasets from a two-node (2R2C) thermal network:
//
//   c_in  dT_in/dt  = (T_env - T_in)/r1 + Q_heat + A_sol * solar + gains
//   c_env dT_env/dt = (T_in - T_env)/r1 + (T_out - T_env)/r2_eff
//   r2_eff = r2 / (1 + wind_coeff * wind)
//
// integrated with explicit Euler at 1-minute substeps under an on/off
// thermostat with hysteresis.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "msgm/dataio.hpp"
#include "msgm/time.hpp"

namespace msgm::simgen {

struct BuildingParams {
  double c_in = 0;            // J/K
  double c_env = 0;           // J/K
  double r1 = 0;              // K/W, interior <-> envelope
  double r2 = 0;              // K/W, envelope <-> outdoor
  double wind_coeff = 0;      // 1/(m/s)
  double solar_aperture = 0;  // m^2
  double heater_power = 0;    // W
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const BuildingParams&) const = default;
};

// Sampling ranges; every parameter is log-uniform except wind_coeff
// (uniform, since the range includes 0).
struct ParamRanges {
  static constexpr double kCInMin = 5e6, kCInMax = 5e7;
  static constexpr double kCEnvMin = 2e7, kCEnvMax = 2e8;
  static constexpr double kR1Min = 1e-3, kR1Max = 1e-2;
  static constexpr double kR2Min = 2e-3, kR2Max = 2e-2;
  static constexpr double kApertureMin = 1.0, kApertureMax = 10.0;
  static constexpr double kWindMin = 0.0, kWindMax = 0.1;
  static constexpr double kHeaterMin = 4e3, kHeaterMax = 15e3;
  // Upper bound on the daily-mean solar temperature lift aperture * S_mean *
  // (r1 + r2) in K; the aperture range is narrowed per building to respect it.
  static constexpr double kMaxPassiveSolarLift = 15.0;
};

BuildingParams sample_building_params(std::uint64_t archetype_seed,
                                      std::uint64_t global_seed);

struct WeatherClimate {
  double mean_c = 8.0;
  double annual_amplitude_k = 10.0;
  double coldest_day = 15.0;  // day of year of the annual minimum
  double daily_amplitude_k = 4.0;
  double coldest_hour = 4.0;
  double noise_ar = 0.95;
  double noise_std_k = 0.5;
  double solar_max = 800.0;  // W/m^2
  double wind_mean = 3.0;
  double wind_ar = 0.95;
  double wind_std = 0.5;
};

struct WeatherSeries {
  std::vector<UtcSeconds> timestamps;
  std::vector<double> t_out;  // degC
  std::vector<double> solar;  // W/m^2
  std::vector<double> wind;   // m/s
  std::int64_t step_seconds = 0;

  std::size_t size() const { return timestamps.size(); }
};

// Clear-sky irradiance for a given hour and day of year, before noise.
double solar_irradiance(double hour, int day_of_year, double solar_max);

// Throws InvalidArgument for days < 1 or a step that does not divide a day.
WeatherSeries synth_weather(std::uint64_t seed, UtcSeconds start, int days,
                            std::int64_t step_seconds,
                            const WeatherClimate& climate = {});

struct ThermostatSchedule {
  double day_setpoint = 21.0;
  double night_setpoint = 17.0;
  double day_start = 6.0;  // hour of day
  double day_end = 22.0;
  double hysteresis_band = 0.5;

  void validate() const;
  double setpoint_at(double hour) const;
};

struct OccupancyGains {
  double base_gain = 100.0;      // W
  double occupied_gain = 200.0;  // W
  std::array<bool, 24> occupied_hours{};

  void validate() const;
  double at(double hour) const;
};

ThermostatSchedule sample_schedule(std::uint64_t seed);
OccupancyGains sample_gains(std::uint64_t seed);

struct SimulationOptions {
  std::int64_t substep_seconds = 60;
  // Initial node temperatures; defaults to the first setpoint for both.
  std::optional<double> initial_t_in;
  std::optional<double> initial_t_env;
  // Overrides the thermostat with a constant heat input (0 disables heating).
  std::optional<double> forced_heating_w;
};

// Integrates the building over the weather horizon and returns a frame at the
// substep rate with the default building schema. Throws DivergenceError on a
// non-finite state.
dataio::SeriesFrame simulate_building(const BuildingParams& params,
                                      const WeatherSeries& weather,
                                      const ThermostatSchedule& schedule,
                                      const OccupancyGains& gains,
                                      const SimulationOptions& options = {},
                                      std::string building_id = "building",
                                      std::string region = {});

inline constexpr int kRegionCount = 5;

// Per-region climate: an annual-mean offset in [-3, 3] K and a phase jitter
// of the annual cycle, both derived from the global seed.
WeatherClimate region_climate(int region, std::uint64_t global_seed);

struct GenerateOptions {
  UtcSeconds start = utc_from_civil(2023, 1, 1);
  int spinup_days = 14;
  int jobs = 1;
};

// Writes `<id>.csv` for each building (15-minute rows) and `manifest.json`.
// Deterministic in (n_buildings, days, global_seed).
dataio::DatasetManifest generate_dataset(int n_buildings, int days,
                                         std::uint64_t global_seed,
                                         const std::filesystem::path& out_dir,
                                         const GenerateOptions& options = {});

}  // namespace msgm::simgen
