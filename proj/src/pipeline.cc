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

#include "pnrtomo/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "pnrtomo/errors.h"
#include "pnrtomo/rng.h"

namespace pnrtomo {

namespace {

Json rows_json(const Matrix &m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

Matrix json_rows(const Json &rows, std::size_t expected_rows, std::size_t cols, const char *field) {
  if (!rows.is_array() || rows.size() != expected_rows) throw ConfigError(field, "wrong number of rows");
  Matrix m(static_cast<Eigen::Index>(expected_rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < expected_rows; ++i) {
    const auto row = rows[i].get<std::vector<double>>();
    if (row.size() != cols) throw ConfigError(field, "wrong row length");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return m;
}

Json distance_json(const PovmDistance &d) { return Json{{"per_outcome", d.per_outcome}, {"max", d.max}}; }

}  // namespace

std::vector<double> default_probe_ladder() {
  constexpr std::size_t kCount = 19;
  constexpr double kLow = 0.3;
  constexpr double kHigh = 6.0;
  std::vector<double> ladder(kCount);
  for (std::size_t i = 0; i < kCount; ++i) {
    ladder[i] = kLow + (kHigh - kLow) * static_cast<double>(i) / static_cast<double>(kCount - 1);
  }
  return ladder;
}

void PipelineConfig::validate() const {
  detector.validate();
  classifier.validate();
  try {
    solver.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError("solver", e.what());
  }
  if (probes.empty()) throw ConfigError("probes", "must not be empty");
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!std::isfinite(probes[i]) || probes[i] < 0.0) {
      throw ConfigError("probes", "entry " + std::to_string(i) + " must be finite and >= 0");
    }
    if (i > 0 && !(probes[i] > probes[i - 1])) {
      throw ConfigError("probes", "must be strictly increasing (entry " + std::to_string(i) + ")");
    }
  }
  if (probes.back() < 4.0) {
    throw ConfigError("probes", "need at least one value >= 4 to populate the high photon-number classes");
  }
  if (shots_per_probe < 1) throw ConfigError("shots_per_probe", "must be >= 1");
  if (truncation < classifier.outcomes) throw ConfigError("truncation", "must be >= outcomes");
  if (!std::isfinite(reference_probe) || reference_probe < 0.0) {
    throw ConfigError("reference_probe", "must be finite and >= 0");
  }
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

Json pipeline_config_to_json(const PipelineConfig &c) {
  return Json{{"detector", detector_params_to_json(c.detector)},
              {"classifier", classifier_config_to_json(c.classifier)},
              {"solver", solver_options_to_json(c.solver)},
              {"probes", c.probes},
              {"shots_per_probe", c.shots_per_probe},
              {"seed", c.seed},
              {"truncation", c.truncation},
              {"reference_probe", c.reference_probe},
              {"output_dir", c.output_dir},
              {"threads", c.threads}};
}

PipelineConfig pipeline_config_from_json(const Json &j, PipelineConfig c) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  static const std::set<std::string> kKnown = {
      "detector", "classifier", "solver",         "probes",     "shots_per_probe",
      "seed",     "truncation", "reference_probe", "output_dir", "threads"};
  for (const auto &item : j.items()) {
    if (!kKnown.count(item.key())) throw ConfigError(item.key(), "unknown field");
  }
  // Nested sections accept exactly the keys they serialize.
  const auto check_section = [&](const char *section, const Json &known) {
    if (!j.contains(section) || !j[section].is_object()) return;
    for (const auto &item : j[section].items()) {
      if (!known.contains(item.key())) throw ConfigError(std::string(section) + "." + item.key(), "unknown field");
    }
  };
  check_section("detector", detector_params_to_json(c.detector));
  check_section("classifier", classifier_config_to_json(c.classifier));
  check_section("solver", solver_options_to_json(c.solver));
  auto count = [&](const char *key, auto &field) {
    if (!j.contains(key)) return;
    if (!is_count(j[key])) throw ConfigError(key, "expected a non-negative integer");
    field = j[key].get<std::remove_reference_t<decltype(field)>>();
  };
  if (j.contains("detector")) c.detector = detector_params_from_json(j["detector"], c.detector);
  if (j.contains("classifier")) c.classifier = classifier_config_from_json(j["classifier"], c.classifier);
  if (j.contains("solver")) c.solver = solver_options_from_json(j["solver"], c.solver);
  if (j.contains("probes")) {
    if (!j["probes"].is_array()) throw ConfigError("probes", "expected an array of numbers");
    c.probes.clear();
    for (const Json &v : j["probes"]) {
      if (!v.is_number()) throw ConfigError("probes", "expected an array of numbers");
      c.probes.push_back(v.get<double>());
    }
  }
  count("shots_per_probe", c.shots_per_probe);
  count("seed", c.seed);
  count("truncation", c.truncation);
  count("threads", c.threads);
  if (j.contains("reference_probe")) {
    if (!j["reference_probe"].is_number()) throw ConfigError("reference_probe", "expected a number");
    c.reference_probe = j["reference_probe"].get<double>();
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError("output_dir", "expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  c.validate();
  return c;
}

std::uint64_t config_digest(const PipelineConfig &c) {
  Json j = pipeline_config_to_json(c);
  j.erase("output_dir");
  j.erase("threads");
  return fnv1a64(j.dump());
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

std::size_t reference_probe_index(const PipelineConfig &c) {
  std::size_t best = 0;
  for (std::size_t d = 1; d < c.probes.size(); ++d) {
    if (std::abs(c.probes[d] - c.reference_probe) < std::abs(c.probes[best] - c.reference_probe)) best = d;
  }
  return best;
}

std::uint64_t probe_seed(const PipelineConfig &c, std::size_t d) {
  Rng rng = substream(c.seed, stream_id("simulate"), d);
  return rng();
}

std::vector<Shot> simulate_probe(const PipelineConfig &c, std::size_t d) {
  return run_experiment(CoherentProbe(c.probes.at(d)), c.shots_per_probe, c.detector, probe_seed(c, d),
                        c.threads);
}

ProbeClassification classify_probe(std::span<const Shot> shots, const ReferenceSet &refs,
                                   const PipelineConfig &c) {
  ProbeClassification out;
  out.batch = classify_batch(shots, refs, c.classifier, c.threads);
  const std::size_t n_out = c.outcomes();
  out.pattern_frequencies = accumulate_statistics(out.batch.pattern, n_out);
  out.single_point_frequencies = accumulate_statistics(out.batch.single_point, n_out);
  std::size_t pattern_wrong = 0;
  std::size_t single_wrong = 0;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const auto truth = static_cast<std::uint32_t>(std::min<std::size_t>(shots[i].detected_photons, n_out - 1));
    pattern_wrong += out.batch.pattern[i] != truth;
    single_wrong += out.batch.single_point[i] != truth;
  }
  out.pattern_error_rate = static_cast<double>(pattern_wrong) / static_cast<double>(shots.size());
  out.single_point_error_rate = static_cast<double>(single_wrong) / static_cast<double>(shots.size());
  return out;
}

Json classified_statistics_to_json(const ClassifiedStatistics &s) {
  Json j = statistics_to_json(s.pattern_statistics(), s.probes);
  j["single_point"] = rows_json(s.single_point);
  j["pattern_error_rate"] = s.pattern_error_rate;
  j["single_point_error_rate"] = s.single_point_error_rate;
  return j;
}

ClassifiedStatistics classified_statistics_from_json(const Json &j) {
  try {
    LoadedStatistics loaded = statistics_from_json(j);
    ClassifiedStatistics s;
    s.probes = loaded.probes;
    s.pattern = loaded.stats.entries();
    s.shot_counts = loaded.stats.shot_counts();
    const std::size_t rows = s.probes.size();
    const std::size_t cols = loaded.stats.outcomes();
    s.single_point = json_rows(j.at("single_point"), rows, cols, "single_point");
    s.pattern_error_rate = j.at("pattern_error_rate").get<std::vector<double>>();
    s.single_point_error_rate = j.at("single_point_error_rate").get<std::vector<double>>();
    if (s.pattern_error_rate.size() != rows || s.single_point_error_rate.size() != rows) {
      throw ConfigError("statistics", "error rate arrays do not match the probe count");
    }
    return s;
  } catch (const Json::exception &e) {
    throw ConfigError("statistics", e.what());
  }
}

std::pair<PovmMatrix, SolverReport> tomography_stage(const ClassifiedStatistics &stats,
                                                     const PipelineConfig &c) {
  if (stats.probes != c.probes || stats.probes.size() != static_cast<std::size_t>(stats.pattern.rows())) {
    throw ShapeError("statistics rows do not match the probe ladder");
  }
  if (static_cast<std::size_t>(stats.pattern.cols()) != c.outcomes()) {
    throw ShapeError("statistics have " + std::to_string(stats.pattern.cols()) + " outcomes, configuration has " +
                     std::to_string(c.outcomes()));
  }
  const ProbeMatrix F(make_probes(stats.probes), c.truncation);
  return reconstruct(stats.pattern_statistics(), F, c.solver);
}

PipelineResult run_pipeline(const PipelineConfig &c) {
  c.validate();
  const std::size_t d_ref = reference_probe_index(c);
  std::vector<Shot> reference_shots = simulate_probe(c, d_ref);
  ReferenceSet refs = build_references(reference_shots, c.classifier);

  const std::size_t D = c.probes.size();
  const auto N = static_cast<Eigen::Index>(c.outcomes());
  ClassifiedStatistics stats;
  stats.probes = c.probes;
  stats.pattern.resize(static_cast<Eigen::Index>(D), N);
  stats.single_point.resize(static_cast<Eigen::Index>(D), N);
  for (std::size_t d = 0; d < D; ++d) {
    const std::vector<Shot> shots = d == d_ref ? std::move(reference_shots) : simulate_probe(c, d);
    const ProbeClassification pc = classify_probe(shots, refs, c);
    for (Eigen::Index n = 0; n < N; ++n) {
      stats.pattern(static_cast<Eigen::Index>(d), n) = pc.pattern_frequencies[static_cast<std::size_t>(n)];
      stats.single_point(static_cast<Eigen::Index>(d), n) =
          pc.single_point_frequencies[static_cast<std::size_t>(n)];
    }
    stats.pattern_error_rate.push_back(pc.pattern_error_rate);
    stats.single_point_error_rate.push_back(pc.single_point_error_rate);
    stats.shot_counts.push_back(shots.size());
  }
  auto [povm, report] = tomography_stage(stats, c);
  return PipelineResult{std::move(refs), std::move(stats), std::move(povm), std::move(report)};
}

Json build_report(const PipelineConfig &c, const ClassifiedStatistics &stats, const PovmMatrix &povm,
                  const SolverReport &report) {
  const std::size_t N = povm.outcomes();
  const std::size_t M = povm.truncation();
  if (static_cast<std::size_t>(stats.pattern.cols()) != N) {
    throw ShapeError("statistics and POVM disagree on the number of outcomes");
  }
  const double eta = c.detector.efficiency;
  const double eta_hat = povm(1, 1);

  Json rows = Json::array();
  double pattern_tv_sum = 0.0;
  double single_tv_sum = 0.0;
  for (std::size_t d = 0; d < stats.probes.size(); ++d) {
    const auto di = static_cast<Eigen::Index>(d);
    const std::vector<double> theory = folded_poisson(eta * stats.probes[d], N);
    std::vector<double> pattern(N);
    std::vector<double> single(N);
    for (std::size_t n = 0; n < N; ++n) {
      pattern[n] = stats.pattern(di, static_cast<Eigen::Index>(n));
      single[n] = stats.single_point(di, static_cast<Eigen::Index>(n));
    }
    const double pattern_tv = total_variation(pattern, theory);
    const double single_tv = total_variation(single, theory);
    pattern_tv_sum += pattern_tv;
    single_tv_sum += single_tv;
    rows.push_back(Json{{"mean_photon_number", stats.probes[d]},
                        {"theory", theory},
                        {"pattern", pattern},
                        {"single_point", single},
                        {"pattern_total_variation", pattern_tv},
                        {"single_point_total_variation", single_tv},
                        {"pattern_error_rate", stats.pattern_error_rate[d]},
                        {"single_point_error_rate", stats.single_point_error_rate[d]}});
  }

  const PovmMatrix configured = binomial_loss_povm(eta, N, M);
  const PovmMatrix fitted = binomial_loss_povm(std::clamp(eta_hat, 0.0, 1.0), N, M);
  double dark_max = 0.0;
  for (std::size_t n = 1; n < N; ++n) {
    for (std::size_t k = 0; k < n && k < M; ++k) dark_max = std::max(dark_max, povm(k, n));
  }
  const double max_entry_error = (povm.entries() - configured.entries()).cwiseAbs().maxCoeff();

  auto mean = [](const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };

  return Json{
      {"config_digest", digest_hex(config_digest(c))},
      {"truncation", M},
      {"outcomes", N},
      {"gamma", report.options.gamma},
      {"efficiency_configured", eta},
      {"efficiency_estimate", eta_hat},
      {"efficiency_error", eta_hat - eta},
      {"statistics", rows},
      {"povm",
       Json{{"distance_to_configured", distance_json(povm_distance(povm, configured))},
            {"distance_to_estimate", distance_json(povm_distance(povm, fitted))},
            {"max_entry_error_configured", max_entry_error},
            {"max_dark_entry", dark_max},
            {"theta", rows_json(povm.entries())},
            {"model_estimate", rows_json(fitted.entries())}}},
      {"classifier_comparison",
       Json{{"pattern_mean_error_rate", mean(stats.pattern_error_rate)},
            {"single_point_mean_error_rate", mean(stats.single_point_error_rate)},
            {"pattern_total_variation_sum", pattern_tv_sum},
            {"single_point_total_variation_sum", single_tv_sum}}},
      {"solver", solver_report_to_json(report)}};
}

}  // namespace pnrtomo
