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

#include "gtest/gtest.h"

#include "pnrtomo/pipeline.h"

using namespace pnrtomo;

namespace {

std::size_t count(const std::string &haystack, const std::string &needle) {
  std::size_t n = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

Json small_report() {
  PipelineConfig c;
  c.probes = {0.5, 2.0, 5.7};
  c.shots_per_probe = 1500;
  c.truncation = 25;
  c.classifier.reference_method = ReferenceMethod::kSupervised;
  const PipelineResult r = run_pipeline(c);
  return build_report(c, r.statistics, r.povm, r.report);
}

}  // namespace

TEST(Svg, chart_is_well_formed_and_escaped) {
  Chart chart;
  chart.title = "a < b & c";
  chart.x_label = "x";
  chart.y_label = "y";
  chart.digest = "0123456789abcdef";
  chart.series.push_back(Series{"line", {0.0, 1.0, 2.0}, {0.0, 0.5, 1.0}, Series::Style::kLine, 0});
  chart.series.push_back(Series{"", {0.5}, {0.25}, Series::Style::kCircles, 1});
  chart.series.push_back(Series{"bars", {0.0, 1.0}, {0.3, 0.7}, Series::Style::kBars, 2});
  const std::string svg = render_svg(chart);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u) << svg.substr(0, 80);
  EXPECT_NE(svg.find("<svg xmlns="), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_NE(svg.find("<!-- config_digest: 0123456789abcdef -->"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
}

TEST(Svg, empty_chart_still_renders) {
  Chart chart;
  chart.title = "empty";
  const std::string svg = render_svg(chart);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Svg, report_charts_are_deterministic) {
  const Json report = small_report();
  for (auto chart : {&statistics_chart, &error_chart}) {
    const std::string a = chart(report);
    EXPECT_EQ(a, chart(report));
    EXPECT_NE(a.find(report["config_digest"].get<std::string>()), std::string::npos);
    EXPECT_EQ(a.find("nan"), std::string::npos);
    EXPECT_EQ(a.find("inf"), std::string::npos);
  }
  const std::string povm = povm_chart(report);
  EXPECT_EQ(povm, povm_chart(report));
  EXPECT_EQ(povm.find("nan"), std::string::npos);
}
