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

#include "pnrtomo/classifier.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "oracles.h"
#include "pnrtomo/errors.h"

using namespace pnrtomo;

namespace {

constexpr double kDt = 20e-12;

DetectorParams quiet_params() {
  DetectorParams p;
  p.noise_sigma = 0.0;
  p.jitter_sigma = 0.0;
  return p;
}

std::vector<Waveform> waveforms_of(const std::vector<Shot> &shots) {
  std::vector<Waveform> out;
  out.reserve(shots.size());
  for (const Shot &s : shots) out.push_back(s.waveform);
  return out;
}

/// Window samples 15..25 of the noiseless response for label l.
std::vector<double> noiseless_window(std::uint32_t m, const DetectorParams &p) {
  const Waveform w = low_pass(circuit_response(m, p), p.analog_bandwidth);
  return {w.samples.begin() + 15, w.samples.begin() + 26};
}

/// Three flat-ish templates with exactly representable values so midpoints
/// are exact ties.
ReferenceSet toy_references(double offset = 0.0) {
  std::vector<std::vector<double>> t(3, std::vector<double>(11));
  for (std::size_t i = 0; i < 11; ++i) {
    t[0][i] = offset;
    t[1][i] = offset + 1.0 + 0.25 * static_cast<double>(i % 2);
    t[2][i] = offset + 3.0 + 0.5 * static_cast<double>(i % 3);
  }
  return ReferenceSet(t, 300e-12, 500e-12, 300e-12, kDt, 400e-12);
}

Waveform on_grid(const std::vector<double> &window, double fill = 0.0) {
  Waveform w;
  w.dt = kDt;
  w.samples.assign(40, fill);
  std::copy(window.begin(), window.end(), w.samples.begin() + 15);
  return w;
}

ClassifierConfig config_with(std::size_t outcomes) {
  ClassifierConfig c;
  c.outcomes = outcomes;
  return c;
}

}  // namespace

TEST(Window, snaps_inward_to_the_grid) {
  const SampleWindow w = snap_window(300e-12, 500e-12, 0.0, kDt, 512);
  EXPECT_EQ(w.first, 15u);
  EXPECT_EQ(w.last, 25u);
  EXPECT_EQ(w.size(), 11u);
  const SampleWindow inner = snap_window(301e-12, 499e-12, 0.0, kDt, 512);
  EXPECT_EQ(inner.first, 16u);
  EXPECT_EQ(inner.last, 24u);
  EXPECT_THROW(snap_window(301e-12, 309e-12, 0.0, kDt, 512), std::out_of_range);
  EXPECT_THROW(snap_window(300e-12, 500e-12, 0.0, kDt, 20), std::out_of_range);
}

TEST(ReferenceSet, checks_ordering_and_shape) {
  EXPECT_NO_THROW(toy_references());
  std::vector<std::vector<double>> swapped{{1.0, 1.0}, {0.0, 0.0}};
  EXPECT_THROW(ReferenceSet(swapped, 300e-12, 320e-12, 300e-12, kDt, 300e-12), std::invalid_argument);
  std::vector<std::vector<double>> ragged{{0.0, 0.0}, {1.0}};
  EXPECT_THROW(ReferenceSet(ragged, 300e-12, 320e-12, 300e-12, kDt, 300e-12), std::invalid_argument);
  std::vector<std::vector<double>> single{{0.0}};
  EXPECT_THROW(ReferenceSet(single, 300e-12, 320e-12, 300e-12, kDt, 300e-12), std::invalid_argument);
}

TEST(ReferenceSet, json_round_trip) {
  const ReferenceSet refs = toy_references(0.5);
  const Json j = Json::parse(reference_set_to_json(refs).dump());
  EXPECT_EQ(j["labels"].back(), ">=2");
  const ReferenceSet back = reference_set_from_json(j);
  EXPECT_EQ(back.outcomes(), 3u);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(back.templates(l), refs.templates(l));
  EXPECT_EQ(back.single_point_index(), 5u);
  Json broken = j;
  broken["templates"][1] = Json::array({1.0});
  EXPECT_THROW(reference_set_from_json(broken), ConfigError);
}

TEST(PatternMatch, template_itself_gets_its_label) {
  const ReferenceSet refs = toy_references();
  for (std::uint32_t l = 0; l < 3; ++l) EXPECT_EQ(classify_pattern(on_grid(refs.templates(l)), refs), l);
}

TEST(PatternMatch, scores_are_sums_of_squares) {
  const ReferenceSet refs = toy_references();
  Waveform w = on_grid(refs.templates(1));
  w.samples[20] += 0.5;
  const auto s = pattern_scores(w, refs);
  double expected0 = 0.0;
  for (std::size_t i = 0; i < 11; ++i) {
    const double d = w.samples[15 + i] - refs.templates(0)[i];
    expected0 += d * d;
  }
  EXPECT_DOUBLE_EQ(s[0], expected0);
  EXPECT_DOUBLE_EQ(s[1], 0.25);
}

TEST(PatternMatch, midpoint_goes_to_the_smaller_label) {
  const ReferenceSet refs = toy_references();
  std::vector<double> mid(11);
  for (std::size_t i = 0; i < 11; ++i) mid[i] = 0.5 * (refs.templates(1)[i] + refs.templates(2)[i]);
  const Waveform w = on_grid(mid);
  const auto s = pattern_scores(w, refs);
  ASSERT_EQ(s[1], s[2]);
  EXPECT_EQ(classify_pattern(w, refs), 1u);
}

TEST(PatternMatch, common_offset_does_not_change_labels) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 0.8);
  const ReferenceSet refs = toy_references();
  for (double offset : {-2.0, 0.75, 10.0}) {
    const ReferenceSet shifted = toy_references(offset);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x(11);
      for (std::size_t i = 0; i < 11; ++i) x[i] = refs.templates(trial % 3)[i] + g(rng);
      std::vector<double> y = x;
      for (double &v : y) v += offset;
      EXPECT_EQ(classify_pattern(on_grid(x), refs), classify_pattern(on_grid(y), shifted));
    }
  }
}

TEST(PatternMatch, noise_inside_half_the_template_gap_is_harmless) {
  const DetectorParams p = quiet_params();
  std::vector<std::vector<double>> t;
  for (std::uint32_t m = 0; m < 7; ++m) t.push_back(noiseless_window(m, p));
  const ReferenceSet refs(t, 300e-12, 500e-12, 300e-12, kDt, 400e-12);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < 7; ++l) {
    if (l == 2) continue;
    double d2 = 0.0;
    for (std::size_t i = 0; i < 11; ++i) d2 += (t[2][i] - t[l][i]) * (t[2][i] - t[l][i]);
    gap = std::min(gap, std::sqrt(d2));
  }
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> e(11);
    double norm = 0.0;
    for (double &v : e) {
      v = g(rng);
      norm += v * v;
    }
    const double scale = 0.499 * gap / std::sqrt(norm);
    std::vector<double> x = t[2];
    for (std::size_t i = 0; i < 11; ++i) x[i] += scale * e[i];
    EXPECT_EQ(classify_pattern(on_grid(x), refs), 2u);
  }
}

TEST(PatternMatch, grid_mismatch_and_short_records) {
  const ReferenceSet refs = toy_references();
  Waveform w = on_grid(refs.templates(0));
  w.dt = 10e-12;
  EXPECT_THROW(pattern_scores(w, refs), std::invalid_argument);
  w = on_grid(refs.templates(0));
  w.t0 = 7e-12;
  EXPECT_THROW(pattern_scores(w, refs), std::invalid_argument);
  w = on_grid(refs.templates(0));
  w.samples.resize(20);
  EXPECT_THROW(pattern_scores(w, refs), std::out_of_range);
}

TEST(SinglePoint, value_and_tie_rules) {
  const ReferenceSet refs = toy_references();
  const ClassifierConfig c = config_with(3);
  const std::size_t at = 20;  // 400 ps
  Waveform w = on_grid(std::vector<double>(11, 0.0));
  w.samples[at] = refs.single_point_value(2);
  EXPECT_EQ(classify_single_point(w, refs, c), 2u);
  w.samples[at] = 0.5 * (refs.single_point_value(0) + refs.single_point_value(1));
  EXPECT_EQ(classify_single_point(w, refs, c), 0u);
  w.samples[at] = refs.single_point_value(1) + 0.01;
  w.samples[at - 1] = 100.0;
  EXPECT_EQ(classify_single_point(w, refs, c), 1u);
}

TEST(SupervisedReferences, noiseless_shots_reproduce_the_traces) {
  const DetectorParams p = quiet_params();
  const auto shots = run_experiment(CoherentProbe(5.7), 3000, p, 3);
  const ReferenceSet refs = build_references_supervised(shots, ClassifierConfig{});
  EXPECT_EQ(refs.outcomes(), 7u);
  EXPECT_DOUBLE_EQ(refs.first_sample_time(), 300e-12);
  for (std::uint32_t m = 0; m < 6; ++m) {
    const auto expected = noiseless_window(m, p);
    for (std::size_t i = 0; i < 11; ++i) EXPECT_NEAR(refs.templates(m)[i], expected[i], 1e-15) << m << " " << i;
  }
}

TEST(SupervisedReferences, error_shrinks_as_standard_error) {
  DetectorParams p = quiet_params();
  p.noise_sigma = 1e-3;
  const auto shots = run_experiment(CoherentProbe(5.7), 10000, p, 4);
  const ReferenceSet refs = build_references_supervised(shots, ClassifierConfig{});
  std::vector<std::size_t> count(7, 0);
  for (const Shot &s : shots) ++count[std::min<std::uint32_t>(s.detected_photons, 6)];
  std::size_t beyond_typical = 0, total = 0;
  for (std::uint32_t m = 0; m < 6; ++m) {
    const auto expected = noiseless_window(m, p);
    const double sem = p.noise_sigma / std::sqrt(static_cast<double>(count[m]));
    for (std::size_t i = 0; i < 11; ++i) {
      const double err = std::abs(refs.templates(m)[i] - expected[i]);
      EXPECT_LE(err, 5.0 * sem) << m << " " << i;
      beyond_typical += err > 3.0 * sem;
      ++total;
    }
  }
  // Three standard errors are exceeded with probability 0.27% per sample.
  EXPECT_LE(beyond_typical, 2u) << "of " << total;
}

TEST(SupervisedReferences, missing_label_is_named) {
  DetectorParams p = quiet_params();
  auto shots = run_experiment(CoherentProbe(5.7), 3000, p, 5);
  std::erase_if(shots, [](const Shot &s) { return s.detected_photons == 3; });
  try {
    build_references_supervised(shots, ClassifierConfig{});
    FAIL() << "expected CoverageError";
  } catch (const CoverageError &e) {
    EXPECT_EQ(e.label(), 3u);
    EXPECT_NE(std::string(e.what()).find("label 3"), std::string::npos);
  }
}

TEST(HistogramReferences, noiseless_mixture_is_recovered_exactly) {
  const DetectorParams p = quiet_params();
  const auto shots = run_experiment(CoherentProbe(5.7), 10000, p, 6);
  const ClassifierConfig c;
  const ReferenceSet hist = build_references_histogram(waveforms_of(shots), c, 7);
  const ReferenceSet sup = build_references_supervised(shots, c);
  for (std::uint32_t l = 0; l < 7; ++l) {
    for (std::size_t i = 0; i < 11; ++i) {
      EXPECT_NEAR(hist.templates(l)[i], sup.templates(l)[i], 1e-12) << l << " " << i;
    }
  }
  for (std::uint32_t m = 0; m < 6; ++m) {
    const auto expected = noiseless_window(m, p);
    for (std::size_t i = 0; i < 11; ++i) EXPECT_NEAR(hist.templates(m)[i], expected[i], 1e-12);
  }
}

TEST(HistogramReferences, agree_with_supervised_within_noise) {
  DetectorParams p;
  p.noise_sigma = 0.1e-3;
  const auto shots = run_experiment(CoherentProbe(5.7), 10000, p, 7);
  const ClassifierConfig c;
  const ReferenceSet hist = build_references_histogram(waveforms_of(shots), c, 7);
  const ReferenceSet sup = build_references_supervised(shots, c);
  for (std::uint32_t l = 0; l < 7; ++l) {
    for (std::size_t i = 0; i < 11; ++i) {
      EXPECT_LE(std::abs(hist.templates(l)[i] - sup.templates(l)[i]), p.noise_sigma) << l << " " << i;
    }
  }
}

TEST(HistogramReferences, overlapping_classes_are_rejected) {
  DetectorParams p;
  p.noise_sigma = 1e-3;
  const auto shots = run_experiment(CoherentProbe(5.7), 10000, p, 8);
  EXPECT_THROW(build_references_histogram(waveforms_of(shots), ClassifierConfig{}, 7), SeparationError);
}

TEST(HistogramReferences, default_noise_level_classifies_well) {
  const DetectorParams p;
  const auto shots = run_experiment(CoherentProbe(5.7), 10000, p, 9);
  const ClassifierConfig c;
  const ReferenceSet refs = build_references(shots, c);
  const BatchClassification b = classify_batch(shots, refs, c);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < shots.size(); ++i) errors += b.pattern[i] != std::min<std::uint32_t>(shots[i].detected_photons, 6);
  EXPECT_LE(errors, 10u);
}

TEST(Classification, noiseless_shots_are_all_correct) {
  const DetectorParams p = quiet_params();
  const auto shots = run_experiment(CoherentProbe(5.7), 5000, p, 10);
  const ClassifierConfig c;
  const ReferenceSet refs = build_references_histogram(waveforms_of(shots), c, 7);
  const BatchClassification b = classify_batch(shots, refs, c);
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const std::uint32_t truth = std::min<std::uint32_t>(shots[i].detected_photons, 6);
    EXPECT_EQ(b.pattern[i], truth);
    EXPECT_EQ(b.single_point[i], truth);
  }
}

TEST(Classification, pattern_is_no_worse_than_single_point) {
  DetectorParams p;
  p.noise_sigma = 0.5e-3;
  const auto shots = run_experiment(CoherentProbe(5.7), 10000, p, 11);
  ClassifierConfig c;
  c.reference_method = ReferenceMethod::kSupervised;
  const ReferenceSet refs = build_references(shots, c);
  const BatchClassification b = classify_batch(shots, refs, c);
  double pattern = 0.0, single = 0.0;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const std::uint32_t truth = std::min<std::uint32_t>(shots[i].detected_photons, 6);
    pattern += b.pattern[i] != truth;
    single += b.single_point[i] != truth;
  }
  const double n = static_cast<double>(shots.size());
  pattern /= n;
  single /= n;
  EXPECT_GE(single, 0.02);
  EXPECT_LE(pattern, single + 2.0 * std::sqrt(single * (1.0 - single) / n));
}

TEST(Classification, batch_is_independent_of_threads) {
  DetectorParams p;
  p.noise_sigma = 0.4e-3;
  const auto shots = run_experiment(CoherentProbe(3.0), 3000, p, 12);
  ClassifierConfig c;
  c.reference_method = ReferenceMethod::kSupervised;
  c.min_shots_per_label = 1;
  const ReferenceSet refs = build_references(shots, c);
  const BatchClassification a = classify_batch(shots, refs, c, 1);
  const BatchClassification b = classify_batch(shots, refs, c, 3);
  EXPECT_EQ(a.pattern, b.pattern);
  EXPECT_EQ(a.single_point, b.single_point);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(classification_to_csv(a), classification_to_csv(b));
}

TEST(Classification, worker_errors_reach_the_caller) {
  const DetectorParams p = quiet_params();
  auto shots = run_experiment(CoherentProbe(3.0), 2000, p, 13);
  shots[1500].waveform.samples.resize(10);
  const ReferenceSet refs = toy_references();
  EXPECT_THROW(classify_batch(shots, refs, config_with(3), 4), std::out_of_range);
}

TEST(Classification, csv_layout) {
  const ReferenceSet refs = toy_references();
  std::vector<Shot> shots(2);
  shots[0].waveform = on_grid(refs.templates(2));
  shots[1].waveform = on_grid(refs.templates(0));
  const BatchClassification b = classify_batch(shots, refs, config_with(3));
  const std::string csv = classification_to_csv(b);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "shot,label,sse0,sse1,sse2");
  const std::string single = single_point_to_csv(b);
  EXPECT_EQ(single, "shot,label\n0,2\n1,0\n");
}

TEST(Statistics, counting_examples) {
  EXPECT_EQ(accumulate_statistics(std::vector<std::uint32_t>(5, 0), 4), (std::vector<double>{1.0, 0.0, 0.0, 0.0}));
  EXPECT_EQ(accumulate_statistics(std::vector<std::uint32_t>{0, 1, 1, 2}, 3), (std::vector<double>{0.25, 0.5, 0.25}));
  EXPECT_THROW(accumulate_statistics(std::vector<std::uint32_t>{0, 3}, 3), std::out_of_range);
  EXPECT_THROW(accumulate_statistics(std::vector<std::uint32_t>{}, 3), std::invalid_argument);
}

TEST(Statistics, order_of_labels_does_not_matter) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::uint32_t> label(0, 6);
  std::vector<std::uint32_t> labels(1000);
  for (auto &l : labels) l = label(rng);
  const auto before = accumulate_statistics(labels, 7);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(labels.begin(), labels.end(), rng);
    EXPECT_EQ(accumulate_statistics(labels, 7), before);
  }
}

TEST(Statistics, noiseless_bright_probe_is_thinned_poisson) {
  DetectorParams p = quiet_params();
  p.record_length = 32;
  constexpr std::size_t kShots = 1000000;
  const auto shots = run_experiment(CoherentProbe(5.7), kShots, p, 14);
  const ClassifierConfig c;
  const ReferenceSet refs = build_references_supervised(std::span(shots).first(20000), c);
  const BatchClassification b = classify_batch(shots, refs, c);
  const auto freq = accumulate_statistics(b.pattern, 7);
  EXPECT_LE(total_variation(freq, pnrtomo::testing::folded_poisson_oracle(0.547 * 5.7, 7)), 0.005);
}

TEST(ClassifierConfig, validation_and_json) {
  ClassifierConfig c;
  c.window_start = 600e-12;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ClassifierConfig{};
  c.single_point_time = 200e-12;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ClassifierConfig{};
  c.outcomes = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ClassifierConfig{};
  c.reference_method = ReferenceMethod::kSupervised;
  c.histogram_bins = 64;
  const ClassifierConfig back = classifier_config_from_json(Json::parse(classifier_config_to_json(c).dump()));
  EXPECT_EQ(back.reference_method, ReferenceMethod::kSupervised);
  EXPECT_EQ(back.histogram_bins, 64u);
  EXPECT_THROW(reference_method_from_string("peaks"), ConfigError);
}
