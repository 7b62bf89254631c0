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

// Minimal SVG charts for run reports. Output is a pure function of the
// input: coordinates are printed with fixed precision and series are drawn
// in the order given.

#pragma once

#include <string>
#include <vector>

#include "pnrtomo/povm_io.h"

namespace pnrtomo {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  enum class Style { kLine, kCircles, kCrosses, kBars } style = Style::kLine;
  /// Index into a fixed palette.
  int color = 0;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Written into the file as an XML comment.
  std::string digest;
  int width = 720;
  int height = 420;
};

std::string render_svg(const Chart &chart);

/// Frequencies versus |alpha|^2 for every outcome: theory lines, pattern
/// circles and single-point crosses.
std::string statistics_chart(const Json &report);

/// Reconstructed theta_k^(n) bars against the model at the estimated
/// efficiency, one panel per outcome, for k below `max_k`.
std::string povm_chart(const Json &report, std::size_t max_k = 16);

/// Per-probe error rates of both classifiers.
std::string error_chart(const Json &report);

}  // namespace pnrtomo
