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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "msgm/error.hpp"
#include "msgm/evaluation.hpp"

namespace msgm::evaluation {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 480, kHeight = 400;
constexpr double kLeft = 64, kRight = 16, kTop = 32, kBottom = 48;
constexpr double kLogFloor = 1e-3;  // log axes clamp non-positive values here

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double t(double v) const {
    if (log) {
      const double lv = std::log10(std::max(v, kLogFloor));
      return (lv - lo) / (hi - lo);
    }
    return (v - lo) / (hi - lo);
  }
};

Axis make_axis(double lo, double hi, bool log) {
  Axis a;
  a.log = log;
  if (log) {
    lo = std::log10(std::max(lo, kLogFloor));
    hi = std::log10(std::max(hi, kLogFloor));
    lo = std::floor(lo * 2) / 2;
    hi = std::ceil(hi * 2) / 2;
  } else {
    const double pad = hi > lo ? 0.05 * (hi - lo) : 0.5;
    lo -= pad;
    hi += pad;
  }
  if (hi <= lo) hi = lo + 1;
  a.lo = lo;
  a.hi = hi;
  return a;
}

double px(const Axis& a, double v) { return kLeft + a.t(v) * (kWidth - kLeft - kRight); }
double py(const Axis& a, double v) {
  return kHeight - kBottom - a.t(v) * (kHeight - kTop - kBottom);
}

class Svg {
 public:
  explicit Svg(const std::string& title) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
         << num(kWidth) << "\" height=\"" << num(kHeight) << "\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kWidth / 2, 20, title, "middle", 14);
  }
  void line(double x1, double y1, double x2, double y2, const std::string& style) {
    out_ << "<line x1=\"" << fixed(x1) << "\" y1=\"" << fixed(y1) << "\" x2=\"" << fixed(x2)
         << "\" y2=\"" << fixed(y2) << "\" " << style << "/>\n";
  }
  void circle(double x, double y, double r, const std::string& fill) {
    out_ << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y) << "\" r=\"" << fixed(r)
         << "\" fill=\"" << fill << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& style) {
    out_ << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(w)
         << "\" height=\"" << fixed(h) << "\" " << style << "/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      out_ << (i ? " " : "") << fixed(pts[i].first) << "," << fixed(pts[i].second);
    out_ << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, const char* anchor = "middle",
            int size = 11) {
    out_ << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" font-family=\"sans-serif\""
         << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\">"
         << escape_xml(s) << "</text>\n";
  }
  void frame(const std::string& xlabel, const std::string& ylabel) {
    rect(kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom,
         "fill=\"none\" stroke=\"black\"");
    text((kLeft + kWidth - kRight) / 2, kHeight - 10, xlabel);
    out_ << "<text x=\"14\" y=\"" << fixed((kTop + kHeight - kBottom) / 2)
         << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" "
         << "transform=\"rotate(-90 14 " << fixed((kTop + kHeight - kBottom) / 2) << ")\">"
         << escape_xml(ylabel) << "</text>\n";
  }
  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

fs::path with_ext(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

void log_ticks(Svg& svg, const Axis& x, const Axis& y, bool x_log2 = false) {
  if (y.log)
    for (double e = std::ceil(y.lo); e <= y.hi + 1e-9; e += 1) {
      const double v = std::pow(10.0, e);
      svg.line(kLeft - 4, py(y, v), kLeft, py(y, v), "stroke=\"black\"");
      svg.text(kLeft - 6, py(y, v) + 4, num(v), "end", 10);
    }
  if (x.log && !x_log2)
    for (double e = std::ceil(x.lo); e <= x.hi + 1e-9; e += 1) {
      const double v = std::pow(10.0, e);
      svg.line(px(x, v), kHeight - kBottom, px(x, v), kHeight - kBottom + 4,
               "stroke=\"black\"");
      svg.text(px(x, v), kHeight - kBottom + 16, num(v), "middle", 10);
    }
}

void linear_y_ticks(Svg& svg, const Axis& y) {
  for (int k = 0; k <= 4; ++k) {
    const double v = y.lo + (y.hi - y.lo) * k / 4.0;
    svg.line(kLeft - 4, py(y, v), kLeft, py(y, v), "stroke=\"black\"");
    svg.text(kLeft - 6, py(y, v) + 4, fixed(v, 3), "end", 10);
  }
}

}  // namespace

std::vector<fs::path> emit_scatter(const ComparisonReport& report, const fs::path& stem) {
  if (report.rows.empty()) throw InvalidArgument("scatter: empty comparison");
  std::string csv = "x,y,series,label\n";
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& r : report.rows) {
    csv += num(r.a.mae) + "," + num(r.b.mae) + ",mae," + escape_csv(r.building_id) + "\n";
    lo = std::min({lo, r.a.mae, r.b.mae});
    hi = std::max({hi, r.a.mae, r.b.mae});
  }
  const Axis ax = make_axis(lo, hi, true);
  Svg svg("MAE per target building");
  svg.frame(report.label_a + " MAE (K)", report.label_b + " MAE (K)");
  log_ticks(svg, ax, ax);
  // Identity line: points above it favour A.
  svg.line(px(ax, std::pow(10.0, ax.lo)), py(ax, std::pow(10.0, ax.lo)),
           px(ax, std::pow(10.0, ax.hi)), py(ax, std::pow(10.0, ax.hi)),
           "stroke=\"gray\" stroke-dasharray=\"4,3\"");
  for (const auto& r : report.rows) svg.circle(px(ax, r.a.mae), py(ax, r.b.mae), 3, "steelblue");

  const auto csv_path = with_ext(stem, ".csv"), svg_path = with_ext(stem, ".svg");
  write_text(csv_path, csv);
  write_text(svg_path, svg.finish());
  return {csv_path, svg_path};
}

std::vector<fs::path> emit_boxplot(const std::vector<EvalReport>& reports,
                                   const fs::path& stem) {
  if (reports.empty()) throw InvalidArgument("boxplot: no reports");
  std::string csv = "x,y,series,label\n";
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t s = 0; s < reports.size(); ++s)
    for (const auto& b : reports[s].buildings) {
      csv += num(static_cast<double>(s)) + "," + num(b.overall.mae) + "," +
             escape_csv(reports[s].label) + "," + escape_csv(b.building_id) + "\n";
      lo = std::min(lo, b.overall.mae);
      hi = std::max(hi, b.overall.mae);
    }
  const Axis y = make_axis(lo, hi, false);
  Svg svg("Target MAE by model");
  svg.frame("model", "MAE (K)");
  linear_y_ticks(svg, y);
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(reports.size());
  for (std::size_t s = 0; s < reports.size(); ++s) {
    const auto& st = reports[s].summary.mae;
    const double cx = kLeft + slot * (static_cast<double>(s) + 0.5);
    const double w = std::min(60.0, slot * 0.5);
    svg.line(cx, py(y, st.min), cx, py(y, st.q1), "stroke=\"black\"");
    svg.line(cx, py(y, st.q3), cx, py(y, st.max), "stroke=\"black\"");
    svg.line(cx - w / 4, py(y, st.min), cx + w / 4, py(y, st.min), "stroke=\"black\"");
    svg.line(cx - w / 4, py(y, st.max), cx + w / 4, py(y, st.max), "stroke=\"black\"");
    svg.rect(cx - w / 2, py(y, st.q3), w, py(y, st.q1) - py(y, st.q3),
             "fill=\"lightsteelblue\" stroke=\"black\"");
    svg.line(cx - w / 2, py(y, st.median), cx + w / 2, py(y, st.median),
             "stroke=\"darkred\" stroke-width=\"2\"");
    svg.text(cx, kHeight - kBottom + 16, reports[s].label, "middle", 10);
  }
  const auto csv_path = with_ext(stem, ".csv"), svg_path = with_ext(stem, ".svg");
  write_text(csv_path, csv);
  write_text(svg_path, svg.finish());
  return {csv_path, svg_path};
}

std::vector<fs::path> emit_ablation_curve(const AblationReport& report,
                                          const fs::path& stem) {
  if (report.rows.empty()) throw InvalidArgument("ablation curve: empty report");
  std::string csv = "x,y,series,label\n";
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& r : report.rows) {
    const std::string n = std::to_string(r.n_sources);
    csv += n + "," + num(r.best.mae) + ",mae,n=" + n + "\n";
    csv += n + "," + num(r.best.rmse) + ",rmse,n=" + n + "\n";
    lo = std::min({lo, r.best.mae, r.best.rmse});
    hi = std::max({hi, r.best.mae, r.best.rmse});
  }
  Axis x;
  x.lo = std::log2(static_cast<double>(report.rows.front().n_sources));
  x.hi = std::log2(static_cast<double>(report.rows.back().n_sources));
  if (x.hi <= x.lo) x.hi = x.lo + 1;
  x.lo -= 0.25;
  x.hi += 0.25;
  const auto xpos = [&](std::size_t n) {
    return kLeft + (std::log2(static_cast<double>(n)) - x.lo) / (x.hi - x.lo) *
                       (kWidth - kLeft - kRight);
  };
  const Axis y = make_axis(lo, hi, false);
  Svg svg("Zero-shot target error vs. number of sources");
  svg.frame("sources (log2)", "mean target error (K)");
  linear_y_ticks(svg, y);
  std::vector<std::pair<double, double>> pm, pr;
  for (const auto& r : report.rows) {
    const double cx = xpos(r.n_sources);
    svg.line(cx, kHeight - kBottom, cx, kHeight - kBottom + 4, "stroke=\"black\"");
    svg.text(cx, kHeight - kBottom + 16, std::to_string(r.n_sources), "middle", 10);
    pm.emplace_back(cx, py(y, r.best.mae));
    pr.emplace_back(cx, py(y, r.best.rmse));
  }
  svg.polyline(pm, "steelblue");
  svg.polyline(pr, "darkorange");
  for (const auto& p : pm) svg.circle(p.first, p.second, 3, "steelblue");
  for (const auto& p : pr) svg.circle(p.first, p.second, 3, "darkorange");
  svg.text(kWidth - kRight - 4, kTop + 14, "MAE (blue), RMSE (orange)", "end", 10);

  const auto csv_path = with_ext(stem, ".csv"), svg_path = with_ext(stem, ".svg");
  write_text(csv_path, csv);
  write_text(svg_path, svg.finish());
  return {csv_path, svg_path};
}

}  // namespace msgm::evaluation
