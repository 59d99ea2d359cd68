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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace msgm {

// Seconds since the Unix epoch, UTC.
using UtcSeconds = std::int64_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(UtcSeconds t);

// Accepts `YYYY-MM-DDTHH:MM:SS` with an optional trailing `Z` or `+00:00`.
std::optional<UtcSeconds> parse_iso8601(std::string_view text);

UtcSeconds utc_from_civil(int year, unsigned month, unsigned day,
                          unsigned hour = 0, unsigned minute = 0,
                          unsigned second = 0);

// 0-based day of year and fractional hour of day.
int day_of_year(UtcSeconds t);
double hour_of_day(UtcSeconds t);

}  // namespace msgm
