// Copyright 2026 The pnrtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pnrtomo/svg.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pnrtomo {

namespace {

constexpr std::array<const char *, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

const char *color(int i) { return kPalette[static_cast<std::size_t>(i) % kPalette.size()]; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, y0, w, h;          // plot area in pixels
  double xmin, xmax, ymin, ymax;  // data range
  bool bars = false;              // x is a category index padded by 0.5

  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

Frame fit_frame(const std::vector<Series> &series, double x0, double y0, double w, double h) {
  Frame f{x0, y0, w, h, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          0.0, -std::numeric_limits<double>::infinity()};
  for (const Series &s : series) {
    for (double x : s.x) {
      f.xmin = std::min(f.xmin, x);
      f.xmax = std::max(f.xmax, x);
    }
    for (double y : s.y) {
      f.ymin = std::min(f.ymin, y);
      f.ymax = std::max(f.ymax, y);
    }
  }
  if (!std::isfinite(f.xmin)) {
    f.xmin = 0.0;
    f.xmax = 1.0;
  }
  if (!(f.xmax > f.xmin)) f.xmax = f.xmin + 1.0;
  if (!std::isfinite(f.ymax) || !(f.ymax > f.ymin)) f.ymax = f.ymin + 1.0;
  // Bars need half a slot of room on each side.
  const bool bars = std::any_of(series.begin(), series.end(),
                                [](const Series &s) { return s.style == Series::Style::kBars; });
  if (bars) {
    f.xmin -= 0.5;
    f.xmax += 0.5;
    f.bars = true;
  }
  f.ymax *= 1.05;
  return f;
}

void draw_axes(std::string &out, const Frame &f) {
  out += "<g stroke=\"#000\" stroke-width=\"1\">";
  out += "<line x1=\"" + num(f.x0) + "\" y1=\"" + num(f.y0 + f.h) + "\" x2=\"" + num(f.x0 + f.w) + "\" y2=\"" +
         num(f.y0 + f.h) + "\"/>";
  out += "<line x1=\"" + num(f.x0) + "\" y1=\"" + num(f.y0) + "\" x2=\"" + num(f.x0) + "\" y2=\"" +
         num(f.y0 + f.h) + "\"/></g>\n";
  out += "<g font-family=\"sans-serif\" font-size=\"10\">";
  for (int i = 0; i <= 4; ++i) {
    double xv = f.xmin + (f.xmax - f.xmin) * i / 4.0;
    if (f.bars) xv = std::round(f.xmin + 0.5 + (f.xmax - f.xmin - 1.0) * i / 4.0);
    const double yv = f.ymin + (f.ymax - f.ymin) * i / 4.0;
    out += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(f.y0 + f.h + 14) + "\" text-anchor=\"middle\">" +
           tick(xv) + "</text>";
    out += "<text x=\"" + num(f.x0 - 4) + "\" y=\"" + num(f.py(yv) + 3) + "\" text-anchor=\"end\">" +
           tick(yv) + "</text>";
  }
  out += "</g>\n";
}

void draw_series(std::string &out, const Series &s, const Frame &f, double bar_width, double bar_offset) {
  const char *c = color(s.color);
  const std::size_t n = std::min(s.x.size(), s.y.size());
  switch (s.style) {
    case Series::Style::kLine: {
      out += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        out += (i ? " " : "") + num(f.px(s.x[i])) + "," + num(f.py(s.y[i]));
      }
      out += "\"/>\n";
      break;
    }
    case Series::Style::kCircles:
      for (std::size_t i = 0; i < n; ++i) {
        out += "<circle cx=\"" + num(f.px(s.x[i])) + "\" cy=\"" + num(f.py(s.y[i])) +
               "\" r=\"3\" fill=\"none\" stroke=\"" + c + "\"/>\n";
      }
      break;
    case Series::Style::kCrosses:
      for (std::size_t i = 0; i < n; ++i) {
        const double x = f.px(s.x[i]);
        const double y = f.py(s.y[i]);
        out += "<path d=\"M" + num(x - 3) + " " + num(y - 3) + "L" + num(x + 3) + " " + num(y + 3) + "M" +
               num(x - 3) + " " + num(y + 3) + "L" + num(x + 3) + " " + num(y - 3) + "\" stroke=\"" + c +
               "\"/>\n";
      }
      break;
    case Series::Style::kBars:
      for (std::size_t i = 0; i < n; ++i) {
        const double left = f.px(s.x[i]) + bar_offset;
        const double top = f.py(std::max(0.0, s.y[i]));
        const double base = f.py(0.0);
        out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(bar_width) +
               "\" height=\"" + num(std::max(0.0, base - top)) + "\" fill=\"" + c + "\"/>\n";
      }
      break;
  }
}

void draw_panel(std::string &out, const std::vector<Series> &series, double x0, double y0, double w, double h) {
  const Frame f = fit_frame(series, x0, y0, w, h);
  draw_axes(out, f);
  std::size_t bar_series = 0;
  for (const Series &s : series) bar_series += s.style == Series::Style::kBars;
  const double slot = f.w / (f.xmax - f.xmin) * 0.8;
  const double bar_width = bar_series ? slot / static_cast<double>(bar_series) : 0.0;
  std::size_t bar_index = 0;
  for (const Series &s : series) {
    double offset = 0.0;
    if (s.style == Series::Style::kBars) offset = -slot / 2.0 + bar_width * static_cast<double>(bar_index++);
    draw_series(out, s, f, bar_width, offset);
  }
}

std::string open_svg(int width, int height, const std::string &title, const std::string &digest) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
         "\">\n";
  if (!digest.empty()) out += "<!-- config_digest: " + escape(digest) + " -->\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  out += "<text x=\"" + std::to_string(width / 2) +
         "\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" + escape(title) +
         "</text>\n";
  return out;
}

void legend(std::string &out, const std::vector<Series> &series, double x, double y) {
  out += "<g font-family=\"sans-serif\" font-size=\"10\">";
  std::size_t row = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i].label.empty()) continue;
    const double yy = y + 13.0 * static_cast<double>(row++);
    out += "<rect x=\"" + num(x) + "\" y=\"" + num(yy - 8) + "\" width=\"10\" height=\"8\" fill=\"" +
           color(series[i].color) + "\"/>";
    out += "<text x=\"" + num(x + 14) + "\" y=\"" + num(yy) + "\">" + escape(series[i].label) + "</text>";
  }
  out += "</g>\n";
}

}  // namespace

std::string render_svg(const Chart &chart) {
  std::string out = open_svg(chart.width, chart.height, chart.title, chart.digest);
  const double left = 60.0;
  const double top = 30.0;
  const double w = chart.width - left - 150.0;
  const double h = chart.height - top - 50.0;
  draw_panel(out, chart.series, left, top, w, h);
  out += "<g font-family=\"sans-serif\" font-size=\"11\">";
  out += "<text x=\"" + num(left + w / 2) + "\" y=\"" + num(chart.height - 8.0) + "\" text-anchor=\"middle\">" +
         escape(chart.x_label) + "</text>";
  out += "<text x=\"14\" y=\"" + num(top + h / 2) + "\" transform=\"rotate(-90 14 " + num(top + h / 2) +
         ")\" text-anchor=\"middle\">" + escape(chart.y_label) + "</text></g>\n";
  legend(out, chart.series, left + w + 12.0, top + 10.0);
  out += "</svg>\n";
  return out;
}

std::string statistics_chart(const Json &report) {
  Chart chart;
  chart.title = "Outcome frequencies: theory (lines), pattern (o), single point (x)";
  chart.x_label = "mean photon number |alpha|^2";
  chart.y_label = "frequency";
  chart.digest = report.value("config_digest", "");
  const Json &rows = report.at("statistics");
  const std::size_t outcomes = report.at("outcomes").get<std::size_t>();
  std::vector<double> x;
  for (const Json &r : rows) x.push_back(r.at("mean_photon_number").get<double>());
  for (std::size_t n = 0; n < outcomes; ++n) {
    Series theory{"n=" + std::to_string(n) + (n + 1 == outcomes ? "+" : ""), x, {}, Series::Style::kLine,
                  static_cast<int>(n)};
    Series pattern{"", x, {}, Series::Style::kCircles, static_cast<int>(n)};
    Series single{"", x, {}, Series::Style::kCrosses, static_cast<int>(n)};
    for (const Json &r : rows) {
      theory.y.push_back(r.at("theory")[n].get<double>());
      pattern.y.push_back(r.at("pattern")[n].get<double>());
      single.y.push_back(r.at("single_point")[n].get<double>());
    }
    chart.series.push_back(std::move(theory));
    chart.series.push_back(std::move(pattern));
    chart.series.push_back(std::move(single));
  }
  return render_svg(chart);
}

std::string povm_chart(const Json &report, std::size_t max_k) {
  const Json &theta = report.at("povm").at("theta");
  const Json &model = report.at("povm").at("model_estimate");
  const std::size_t outcomes = report.at("outcomes").get<std::size_t>();
  const std::size_t kmax = std::min<std::size_t>(max_k, theta.size());
  const int width = 720;
  const int panel_height = 110;
  const int height = 40 + panel_height * static_cast<int>(outcomes);
  std::string out = open_svg(width, height, "Reconstructed POVM (bars) and binomial model at estimated efficiency (line)",
                             report.value("config_digest", ""));
  std::vector<double> k(kmax);
  for (std::size_t i = 0; i < kmax; ++i) k[i] = static_cast<double>(i);
  for (std::size_t n = 0; n < outcomes; ++n) {
    Series bars{"", k, {}, Series::Style::kBars, static_cast<int>(n)};
    Series line{"", k, {}, Series::Style::kLine, 7};
    for (std::size_t i = 0; i < kmax; ++i) {
      bars.y.push_back(theta[i][n].get<double>());
      line.y.push_back(model[i][n].get<double>());
    }
    const double y0 = 30.0 + panel_height * static_cast<double>(n);
    draw_panel(out, {bars, line}, 60.0, y0 + 8.0, width - 140.0, panel_height - 30.0);
    out += "<text x=\"" + num(width - 70.0) + "\" y=\"" + num(y0 + 40.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\">n=" + std::to_string(n) +
           (n + 1 == outcomes ? "+" : "") + "</text>\n";
  }
  out += "<text x=\"" + num(width / 2.0) + "\" y=\"" + num(height - 4.0) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">photon number k</text>\n";
  out += "</svg>\n";
  return out;
}

std::string error_chart(const Json &report) {
  Chart chart;
  chart.title = "Classification error rate per probe";
  chart.x_label = "probe index";
  chart.y_label = "error rate";
  chart.digest = report.value("config_digest", "");
  Series pattern{"pattern", {}, {}, Series::Style::kBars, 0};
  Series single{"single point", {}, {}, Series::Style::kBars, 1};
  double d = 0.0;
  for (const Json &r : report.at("statistics")) {
    pattern.x.push_back(d);
    single.x.push_back(d);
    pattern.y.push_back(r.at("pattern_error_rate").get<double>());
    single.y.push_back(r.at("single_point_error_rate").get<double>());
    d += 1.0;
  }
  chart.series = {pattern, single};
  return render_svg(chart);
}

}  // namespace pnrtomo
