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

// pnrtomo: simulate -> classify -> tomography -> report.
//
// Exit codes: 0 success, 1 other failure, 2 configuration error,
// 3 solver did not converge, 4 I/O error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnrtomo/commands.h"
#include "pnrtomo/errors.h"

namespace {

namespace fs = std::filesystem;
using namespace pnrtomo;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitIo = 4;

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shots;
  std::optional<std::vector<double>> probes;
  std::optional<double> gamma;
  std::optional<std::size_t> truncation;
  std::optional<unsigned> threads;
  std::optional<double> noise_sigma;
  std::optional<double> jitter_sigma;
  std::optional<double> efficiency;
  std::optional<std::string> reference_method;
  std::optional<std::string> solver_method;
  std::optional<std::string> objective_form;
  std::optional<std::string> stats;
};

void add_common(CLI::App *cmd, Overrides &o) {
  cmd->add_option("-c,--config", o.config, "JSON configuration file");
  cmd->add_option("-o,--output-dir", o.output_dir, "Directory for all artifacts");
  cmd->add_option("--seed", o.seed, "Master random seed");
  cmd->add_option("--shots", o.shots, "Shots per probe");
  cmd->add_option("--probes", o.probes, "Probe ladder |alpha|^2 values")->delimiter(',');
  cmd->add_option("--gamma", o.gamma, "Smoothing weight");
  cmd->add_option("--truncation", o.truncation, "Fock truncation M");
  cmd->add_option("--threads", o.threads, "Worker threads for simulation and classification");
  cmd->add_option("--noise-sigma", o.noise_sigma, "Additive noise std (V)");
  cmd->add_option("--jitter-sigma", o.jitter_sigma, "Timing jitter std (s)");
  cmd->add_option("--efficiency", o.efficiency, "Detection efficiency of the simulated detector");
  cmd->add_option("--reference-method", o.reference_method, "histogram or supervised");
  cmd->add_option("--solver-method", o.solver_method, "interior_point or projected_gradient");
  cmd->add_option("--objective-form", o.objective_form, "paper_norm or squared_residual");
}

/// --config wins; otherwise stages after simulate reuse the configuration
/// recorded in the output directory, if any.
PipelineConfig resolve(const Overrides &o, bool reuse_manifest) {
  PipelineConfig c;
  const std::string dir = o.output_dir.value_or(c.output_dir);
  if (o.config) {
    c = load_config(*o.config);
  } else if (reuse_manifest && fs::exists(fs::path(dir) / "manifest.json")) {
    c = load_manifest_config(dir);
  }
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.seed) c.seed = *o.seed;
  if (o.shots) c.shots_per_probe = *o.shots;
  if (o.probes) c.probes = *o.probes;
  if (o.gamma) c.solver.gamma = *o.gamma;
  if (o.truncation) c.truncation = *o.truncation;
  if (o.threads) c.threads = *o.threads;
  if (o.noise_sigma) c.detector.noise_sigma = *o.noise_sigma;
  if (o.jitter_sigma) c.detector.jitter_sigma = *o.jitter_sigma;
  if (o.efficiency) c.detector.efficiency = *o.efficiency;
  if (o.reference_method) c.classifier.reference_method = reference_method_from_string(*o.reference_method);
  if (o.solver_method) c.solver.method = solver_method_from_string(*o.solver_method);
  if (o.objective_form) c.solver.objective_form = objective_form_from_string(*o.objective_form);
  c.validate();
  return c;
}

int run(int argc, char **argv) {
  CLI::App app{"Photon-number-resolving detector simulation, classification and tomography"};
  app.require_subcommand(1);
  Overrides o;
  std::string stage;

  auto *simulate = app.add_subcommand("simulate", "Write one shot container per probe and a manifest");
  auto *classify = app.add_subcommand("classify", "Build references and classify every shot");
  auto *tomography = app.add_subcommand("tomography", "Reconstruct the POVM from the statistics");
  auto *report = app.add_subcommand("report", "Compare the results with the binomial-loss model");
  auto *full = app.add_subcommand("full", "Run all stages in order");
  for (auto *cmd : {simulate, classify, tomography, report, full}) add_common(cmd, o);
  tomography->add_option("--stats", o.stats, "Statistics JSON (default: <output-dir>/stats.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const bool fresh = simulate->parsed() || full->parsed();
  const PipelineConfig c = resolve(o, !fresh);

  bool converged = true;
  if (simulate->parsed() || full->parsed()) {
    cmd_simulate(c);
    std::cerr << "simulated " << c.probes.size() << " probes into " << c.output_dir << "\n";
  }
  if (classify->parsed() || full->parsed()) {
    cmd_classify(c);
    std::cerr << "classified shots; statistics in " << (fs::path(c.output_dir) / "stats.json").string() << "\n";
  }
  if (tomography->parsed() || full->parsed()) {
    std::optional<fs::path> stats;
    if (o.stats) stats = fs::path(*o.stats);
    converged = cmd_tomography(c, stats);
    std::cerr << "reconstruction " << (converged ? "converged" : "did NOT converge") << "\n";
  }
  if (report->parsed() || full->parsed()) {
    cmd_report(c);
    std::cerr << "report written to " << (fs::path(c.output_dir) / "report.json").string() << "\n";
  }
  return converged ? 0 : kExitNotConverged;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const pnrtomo::ConfigError &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pnrtomo::ShapeError &e) {
    std::cerr << "dimension mismatch: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pnrtomo::IoError &e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error &e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
