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

// Photon-number discrimination by template matching.
//
// A ReferenceSet holds one template per outcome label over a fixed time
// window. Labels 0..N-2 are exact photon numbers and N-1 collects everything
// above. A waveform is assigned the label whose template has the smallest sum
// of squared differences over the window. The single-point baseline compares
// one sample against the template values at that time instead.
//
// Times are relative to the waveform origin (Waveform::t0 is the sample at
// index 0). The window includes both endpoints and is snapped inward to the
// sample grid.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pnrtomo/povm_io.h"
#include "pnrtomo/waveform_sim.h"

namespace pnrtomo {

enum class ReferenceMethod { kHistogram, kSupervised };

std::string to_string(ReferenceMethod m);
ReferenceMethod reference_method_from_string(const std::string &s);

struct ClassifierConfig {
  double window_start = 300e-12;
  double window_end = 500e-12;
  double single_point_time = 400e-12;
  std::size_t outcomes = 7;
  /// Bins per histogram; 0 picks the width by the Freedman-Diaconis rule.
  std::size_t histogram_bins = 0;
  /// Minimum peak prominence as a fraction of the histogram maximum.
  double peak_min_prominence = 0.05;
  /// Minimum shots per label for supervised references.
  std::size_t min_shots_per_label = 50;
  ReferenceMethod reference_method = ReferenceMethod::kHistogram;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

Json classifier_config_to_json(const ClassifierConfig &c);
ClassifierConfig classifier_config_from_json(const Json &j, ClassifierConfig defaults = {});

/// Inclusive sample range [first, last] of the window on a grid.
struct SampleWindow {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
};

/// Throws std::out_of_range if the snapped window is empty or leaves the
/// record.
SampleWindow snap_window(double start, double end, double t0, double dt, std::size_t samples);

class ReferenceSet {
 public:
  /// `templates[l]` holds the template for label l, sampled at
  /// `first_sample_time + i * dt`. Throws std::invalid_argument if the
  /// templates differ in length, are not pairwise distinct, or are not
  /// strictly increasing with label at the sample nearest `single_point_time`.
  ReferenceSet(std::vector<std::vector<double>> templates, double window_start, double window_end,
               double first_sample_time, double dt, double single_point_time);

  std::size_t outcomes() const { return templates_.size(); }
  std::size_t length() const { return templates_.front().size(); }
  const std::vector<double> &templates(std::size_t label) const { return templates_.at(label); }
  double window_start() const { return window_start_; }
  double window_end() const { return window_end_; }
  double first_sample_time() const { return first_sample_time_; }
  double dt() const { return dt_; }
  double single_point_time() const { return single_point_time_; }
  /// Template index nearest single_point_time.
  std::size_t single_point_index() const { return single_point_index_; }
  double single_point_value(std::size_t label) const {
    return templates_.at(label)[single_point_index_];
  }

 private:
  std::vector<std::vector<double>> templates_;
  double window_start_;
  double window_end_;
  double first_sample_time_;
  double dt_;
  double single_point_time_;
  std::size_t single_point_index_;
};

Json reference_set_to_json(const ReferenceSet &refs);
ReferenceSet reference_set_from_json(const Json &j);

/// Template l is the mean window of the shots with min(m, N-1) = l. Throws
/// CoverageError if a label has fewer than config.min_shots_per_label shots.
ReferenceSet build_references_supervised(std::span<const Shot> shots, const ClassifierConfig &config);

/// Peaks of the amplitude histogram at each window sample, connected in
/// ascending order. Throws SeparationError if no sample resolves N peaks.
ReferenceSet build_references_histogram(std::span<const Waveform> waveforms,
                                        const ClassifierConfig &config, std::size_t expected_outcomes);

/// Dispatches on config.reference_method.
ReferenceSet build_references(std::span<const Shot> shots, const ClassifierConfig &config);

/// Sum of squared differences to every template. Throws std::out_of_range if
/// the waveform does not cover the window and std::invalid_argument if its
/// sample spacing differs from the references.
std::vector<double> pattern_scores(const Waveform &w, const ReferenceSet &refs);

/// Argmin of pattern_scores; ties go to the smaller label.
std::uint32_t classify_pattern(const Waveform &w, const ReferenceSet &refs);

/// Label whose template value at config.single_point_time is nearest to the
/// waveform sample there; ties go to the smaller label.
std::uint32_t classify_single_point(const Waveform &w, const ReferenceSet &refs,
                                    const ClassifierConfig &config);

struct BatchClassification {
  std::vector<std::uint32_t> pattern;
  std::vector<std::uint32_t> single_point;
  std::vector<std::vector<double>> scores;  // per shot, per label
};

/// Classifies every shot by both methods. Results do not depend on `threads`.
BatchClassification classify_batch(std::span<const Shot> shots, const ReferenceSet &refs,
                                   const ClassifierConfig &config, unsigned threads = 1);

/// Relative frequencies of labels 0..outcomes-1. Throws std::out_of_range on
/// a label >= outcomes and std::invalid_argument on an empty list.
std::vector<double> accumulate_statistics(std::span<const std::uint32_t> labels, std::size_t outcomes);

/// Pattern labels as CSV with columns shot,label,sse0..sse{N-1}.
std::string classification_to_csv(const BatchClassification &batch);

/// Single-point labels as CSV with columns shot,label, in the same row order.
std::string single_point_to_csv(const BatchClassification &batch);

}  // namespace pnrtomo
