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

#include "msgm/time.hpp"

#include <chrono>
#include <cstdio>

namespace msgm {

namespace chr = std::chrono;

UtcSeconds utc_from_civil(int year, unsigned month, unsigned day,
                          unsigned hour, unsigned minute, unsigned second) {
  chr::sys_days d = chr::year{year} / chr::month{month} / chr::day{day};
  return static_cast<UtcSeconds>(d.time_since_epoch().count()) * kSecondsPerDay +
         hour * 3600 + minute * 60 + second;
}

namespace {

struct Civil {
  int year;
  unsigned month, day, hour, minute, second;
};

Civil civil_from_utc(UtcSeconds t) {
  std::int64_t days = t / kSecondsPerDay;
  std::int64_t rem = t % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day()), static_cast<unsigned>(rem / 3600),
          static_cast<unsigned>((rem % 3600) / 60),
          static_cast<unsigned>(rem % 60)};
}

}  // namespace

std::string format_iso8601(UtcSeconds t) {
  Civil c = civil_from_utc(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02uZ", c.year,
                c.month, c.day, c.hour, c.minute, c.second);
  return buf;
}

std::optional<UtcSeconds> parse_iso8601(std::string_view text) {
  if (text.size() < 19) return std::nullopt;
  std::string s(text);
  int y;
  unsigned mo, d, h, mi, se;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%n", &y, &mo, &d, &h, &mi,
                  &se, &consumed) != 6 ||
      consumed != 19)
    return std::nullopt;
  std::string_view tail = text.substr(19);
  if (!(tail.empty() || tail == "Z" || tail == "+00:00")) return std::nullopt;
  chr::year_month_day ymd{chr::year{y}, chr::month{mo}, chr::day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 59) return std::nullopt;
  return utc_from_civil(y, mo, d, h, mi, se);
}

int day_of_year(UtcSeconds t) {
  Civil c = civil_from_utc(t);
  UtcSeconds jan1 = utc_from_civil(c.year, 1, 1);
  return static_cast<int>((t - jan1) / kSecondsPerDay);
}

double hour_of_day(UtcSeconds t) {
  std::int64_t rem = t % kSecondsPerDay;
  if (rem < 0) rem += kSecondsPerDay;
  return static_cast<double>(rem) / 3600.0;
}

}  // namespace msgm
