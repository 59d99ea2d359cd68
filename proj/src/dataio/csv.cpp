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

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "msgm/dataio.hpp"
#include "msgm/error.hpp"

namespace msgm::dataio {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void append_double(std::string& out, double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, ptr);
}

}  // namespace

SeriesFrame read_series_csv(const std::filesystem::path& path,
                            const FeatureSchema& schema,
                            std::string building_id, std::string region) {
  schema.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (building_id.empty()) building_id = path.stem().string();

  std::string line;
  if (!std::getline(in, line))
    throw DataError(DataErrorKind::kMissingColumn, path.string() + ": empty file");
  auto header = split_commas(trim(line));
  const auto wanted = schema.columns();
  const std::size_t C = wanted.size();

  int ts_col = -1;
  std::vector<int> source_col(C, -1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string_view name = trim(header[i]);
    if (name == "timestamp") ts_col = static_cast<int>(i);
    for (std::size_t c = 0; c < C; ++c)
      if (name == wanted[c]) source_col[c] = static_cast<int>(i);
  }
  if (ts_col < 0)
    throw DataError(DataErrorKind::kMissingColumn,
                    path.string() + ": missing column 'timestamp'");
  for (std::size_t c = 0; c < C; ++c)
    if (source_col[c] < 0)
      throw DataError(DataErrorKind::kMissingColumn,
                      path.string() + ": missing column '" + wanted[c] + "'");

  std::vector<UtcSeconds> ts;
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    std::string_view l = trim(line);
    if (l.empty()) continue;
    auto cells = split_commas(l);
    if (cells.size() != header.size())
      throw DataError(DataErrorKind::kNonFiniteValue,
                      path.string() + ": row " + std::to_string(row) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(header.size()),
                      row);
    auto t = parse_iso8601(trim(cells[ts_col]));
    if (!t)
      throw DataError(DataErrorKind::kMalformed,
                      path.string() + ": bad timestamp in row " + std::to_string(row),
                      row);
    if (!ts.empty() && *t <= ts.back())
      throw DataError(DataErrorKind::kNonMonotoneTimestamps,
                      path.string() + ": timestamps not strictly increasing at row " +
                          std::to_string(row),
                      row);
    if (ts.size() >= 2 && *t - ts.back() != ts[1] - ts[0])
      throw DataError(DataErrorKind::kIrregularStep,
                      path.string() + ": irregular step at row " + std::to_string(row),
                      row);
    ts.push_back(*t);
    for (std::size_t c = 0; c < C; ++c) {
      double v;
      if (!parse_double(cells[source_col[c]], v) || !std::isfinite(v))
        throw DataError(DataErrorKind::kNonFiniteValue,
                        path.string() + ": missing or non-finite value in row " +
                            std::to_string(row) + ", column '" + wanted[c] + "'",
                        row);
      values.push_back(v);
    }
    ++row;
  }
  FeatureSchema s = schema;
  if (ts.size() >= 2) {
    const std::int64_t step = ts[1] - ts[0];
    if (step % 60 != 0)
      throw DataError(DataErrorKind::kIrregularStep,
                      path.string() + ": step is not a whole number of minutes");
    s.step_minutes = static_cast<int>(step / 60);
  }
  return SeriesFrame(std::move(building_id), std::move(region), std::move(s),
                     std::move(ts), std::move(values));
}

void write_series_csv(const std::filesystem::path& path,
                      const SeriesFrame& frame) {
  std::string out;
  out.reserve(frame.rows() * (24 + frame.cols() * 20));
  out += "timestamp";
  for (const auto& name : frame.schema().columns()) {
    out.push_back(',');
    out += name;
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < frame.rows(); ++r) {
    out += format_iso8601(frame.timestamps()[r]);
    for (double v : frame.row(r)) {
      out.push_back(',');
      append_double(out, v);
    }
    out.push_back('\n');
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

SeriesFrame resample_15min(const SeriesFrame& frame) {
  constexpr std::int64_t kTarget = 15 * 60;
  const std::int64_t step =
      frame.rows() >= 2 ? frame.step_seconds() : frame.schema().step_minutes * 60LL;
  if (step <= 0 || kTarget % step != 0)
    throw DataError(DataErrorKind::kIrregularStep,
                    "resample: step of " + std::to_string(step) +
                        " s does not divide 15 minutes");
  if (step == kTarget) return frame;

  const std::size_t k = static_cast<std::size_t>(kTarget / step);
  const std::size_t bins = frame.rows() / k;
  const std::size_t C = frame.cols();
  std::vector<UtcSeconds> ts(bins);
  std::vector<double> values(bins * C, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    ts[b] = frame.timestamps()[b * k];
    // Mean as offset from the bin's first sample: exact for constant bins.
    auto first = frame.row(b * k);
    for (std::size_t i = 1; i < k; ++i) {
      auto row = frame.row(b * k + i);
      for (std::size_t c = 0; c < C; ++c) values[b * C + c] += row[c] - first[c];
    }
    for (std::size_t c = 0; c < C; ++c)
      values[b * C + c] = first[c] + values[b * C + c] / static_cast<double>(k);
  }
  return SeriesFrame(frame.building_id(), frame.region(),
                     frame.schema().with_step(15), std::move(ts), std::move(values));
}

}  // namespace msgm::dataio
