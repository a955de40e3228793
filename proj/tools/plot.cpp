// Copyright 2026 The cavityfarm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cavityfarm/errors.hpp"
#include "experiments.hpp"

namespace cavityfarm::cli {
namespace {

constexpr double kWidth = 640.0;
constexpr double kPanelHeight = 220.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 40.0;

struct Series {
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-300 ? 0.0 : v);
  return buf;
}

// Roughly five ticks at 1, 2 or 5 times a power of ten.
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {2.0, 5.0, 10.0}) {
    if (raw / step <= 1.0) break;
    step = m * mag;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(t);
  return out;
}

std::pair<double, double> range(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double a = *lo;
  double b = *hi;
  if (b - a <= 1e-12 * std::max(std::abs(a), std::abs(b)) || b == a) {
    const double pad = a == 0.0 ? 1.0 : 0.05 * std::abs(a);
    a -= pad;
    b += pad;
  }
  return {a, b};
}

void panel(std::ostringstream& svg, const Series& s, double y0) {
  const double w = kWidth - kLeft - kRight;
  const double h = kPanelHeight - kTop - kBottom;
  const auto [x_lo, x_hi] = range(s.x);
  const auto [y_lo, y_hi] = range(s.y);
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * w; };
  auto py = [&](double y) { return y0 + kTop + h - (y - y_lo) / (y_hi - y_lo) * h; };

  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(y0 + kTop) << "\" width=\"" << num(w)
      << "\" height=\"" << num(h) << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (double t : ticks(x_lo, x_hi)) {
    svg << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(y0 + kTop + h) << "\" x2=\""
        << num(px(t)) << "\" y2=\"" << num(y0 + kTop + h + 4) << "\" stroke=\"#000\"/>\n"
        << "<text x=\"" << num(px(t)) << "\" y=\"" << num(y0 + kTop + h + 16)
        << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(y_lo, y_hi)) {
    svg << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(py(t)) << "\" x2=\""
        << num(kLeft) << "\" y2=\"" << num(py(t)) << "\" stroke=\"#000\"/>\n"
        << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(t) + 4)
        << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + w / 2) << "\" y=\"" << num(y0 + kPanelHeight - 6)
      << "\" text-anchor=\"middle\">" << s.x_label << "</text>\n"
      << "<text x=\"14\" y=\"" << num(y0 + kTop + h / 2) << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 14 " << num(y0 + kTop + h / 2) << ")\">" << s.y_label
      << "</text>\n";
  svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (i > 0) svg << ' ';
    svg << num(px(s.x[i])) << ',' << num(py(s.y[i]));
  }
  svg << "\"/>\n";
}

void require_schema(const CsvTable& table, const std::vector<std::string>& header,
                    std::string_view kind) {
  if (table.header != header) {
    std::string expected;
    for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
    throw PreconditionError("plot: CSV header does not match the " + std::string(kind) +
                            " schema (" + expected + ")");
  }
  if (table.rows.empty()) throw PreconditionError("plot: CSV has no data rows");
}

}  // namespace

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "valley") return PlotKind::kValley;
  if (name == "vibration") return PlotKind::kVibration;
  if (name == "freq") return PlotKind::kFreq;
  if (name == "gw") return PlotKind::kGw;
  throw PreconditionError("plot: unknown kind '" + std::string(name) +
                          "' (expected valley, vibration, freq or gw)");
}

std::string render_svg(const CsvTable& table, PlotKind kind) {
  std::vector<Series> panels;
  switch (kind) {
    case PlotKind::kValley:
      require_schema(table, kValleyHeader, "valley");
      panels.push_back({"f", "E_N", table.numeric_column("f"), table.numeric_column("E_N_steady")});
      break;
    case PlotKind::kVibration:
    case PlotKind::kGw: {
      require_schema(table, kind == PlotKind::kGw ? kGwHeader : kVibrationHeader,
                     kind == PlotKind::kGw ? "gw" : "vibration");
      const auto cycle = table.numeric_column("cycle");
      panels.push_back({"cycle", "E_N", cycle, table.numeric_column("E_N")});
      panels.push_back({"cycle", "2&lt;q1 p2&gt;", cycle, table.numeric_column("corr_q1p2")});
      if (kind == PlotKind::kGw) panels.push_back({"cycle", "L", cycle, table.numeric_column("L")});
      break;
    }
    case PlotKind::kFreq: {
      require_schema(table, kFreqHeader, "freq");
      auto gamma = table.numeric_column("gamma");
      for (double& g : gamma) {
        if (!(g > 0.0)) throw PreconditionError("plot: gamma must be positive");
        g = std::log10(g);
      }
      panels.push_back({"log10 gamma", "max |2&lt;q1 p2&gt;|", gamma,
                        table.numeric_column("max_abs_corr_q1p2")});
      break;
    }
  }
  std::ostringstream svg;
  const double height = kPanelHeight * static_cast<double>(panels.size());
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    panel(svg, panels[i], kPanelHeight * static_cast<double>(i));
  }
  svg << "</svg>\n";
  return svg.str();
}

void plot_csv(const std::filesystem::path& csv, PlotKind kind, const std::filesystem::path& out) {
  const std::string svg = render_svg(read_csv(csv), kind);
  write_file_atomic(out, svg);
}

}  // namespace cavityfarm::cli
