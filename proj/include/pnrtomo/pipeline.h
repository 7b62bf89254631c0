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

// End-to-end experiment: simulate shots for a ladder of coherent probes,
// classify them against references from the brightest-suitable probe,
// reconstruct the POVM and compare it with the binomial-loss model.
//
// Every stage draws its randomness from the single configured seed, so the
// configuration fixes all results. The stages here work in memory; the
// file-backed commands live in commands.h.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnrtomo/classifier.h"
#include "pnrtomo/povm.h"
#include "pnrtomo/povm_io.h"
#include "pnrtomo/tomography.h"
#include "pnrtomo/waveform_sim.h"

namespace pnrtomo {

/// 19 values of |alpha|^2 evenly spaced from 0.3 to 6.0.
std::vector<double> default_probe_ladder();

struct PipelineConfig {
  DetectorParams detector;
  ClassifierConfig classifier;
  SolverOptions solver;
  std::vector<double> probes = default_probe_ladder();
  std::size_t shots_per_probe = 10000;
  std::uint64_t seed = 1;
  std::size_t truncation = 70;
  /// References come from the ladder value nearest this |alpha|^2.
  double reference_probe = 5.7;
  std::string output_dir = "pnrtomo-out";
  unsigned threads = 1;

  std::size_t outcomes() const { return classifier.outcomes; }

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

Json pipeline_config_to_json(const PipelineConfig &c);

/// Reads the documented schema; absent fields keep their defaults and
/// unknown fields are rejected. Validates the result.
PipelineConfig pipeline_config_from_json(const Json &j, PipelineConfig defaults = {});

/// FNV-1a of the canonical JSON without output_dir and threads, which do
/// not affect results.
std::uint64_t config_digest(const PipelineConfig &c);

/// Sixteen lowercase hex digits.
std::string digest_hex(std::uint64_t digest);

std::size_t reference_probe_index(const PipelineConfig &c);

/// Seed handed to run_experiment for probe d.
std::uint64_t probe_seed(const PipelineConfig &c, std::size_t d);

std::vector<Shot> simulate_probe(const PipelineConfig &c, std::size_t d);

struct ProbeClassification {
  BatchClassification batch;
  std::vector<double> pattern_frequencies;
  std::vector<double> single_point_frequencies;
  /// Fraction of shots whose label differs from min(m, N-1).
  double pattern_error_rate = 0.0;
  double single_point_error_rate = 0.0;
};

ProbeClassification classify_probe(std::span<const Shot> shots, const ReferenceSet &refs,
                                   const PipelineConfig &c);

/// Per-probe results of the classify stage, rows in ladder order.
struct ClassifiedStatistics {
  std::vector<double> probes;
  Matrix pattern;
  Matrix single_point;
  std::vector<double> pattern_error_rate;
  std::vector<double> single_point_error_rate;
  std::vector<std::uint64_t> shot_counts;

  StatisticsMatrix pattern_statistics() const { return StatisticsMatrix(pattern, shot_counts); }
  StatisticsMatrix single_point_statistics() const {
    return StatisticsMatrix(single_point, shot_counts);
  }
};

Json classified_statistics_to_json(const ClassifiedStatistics &s);
ClassifiedStatistics classified_statistics_from_json(const Json &j);

/// Runs the solver on the pattern statistics. Throws ShapeError if the
/// statistics and the ladder disagree.
std::pair<PovmMatrix, SolverReport> tomography_stage(const ClassifiedStatistics &stats,
                                                     const PipelineConfig &c);

struct PipelineResult {
  ReferenceSet references;
  ClassifiedStatistics statistics;
  PovmMatrix povm;
  SolverReport report;
};

/// All stages in memory, one probe at a time.
PipelineResult run_pipeline(const PipelineConfig &c);

/// Summary of a finished run: statistics against folded Poisson theory at the
/// configured efficiency, the reconstruction against binomial_loss_povm at
/// the configured and at the estimated efficiency (theta_1^(1)), and the two
/// classifiers' error rates.
Json build_report(const PipelineConfig &c, const ClassifiedStatistics &stats, const PovmMatrix &povm,
                  const SolverReport &report);

}  // namespace pnrtomo
