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

// File-backed pipeline stages. Each reads and writes files in
// config.output_dir:
//
//   simulate    manifest.json, shots-NN.bin
//   classify    references.json, stats.{csv,json},
//               stats-single-point.{csv,json}, labels-NN.csv,
//               labels-single-point-NN.csv
//   tomography  povm.json, povm.csv
//   report      report.json, statistics.svg, povm.svg, errors.svg
//
// Every file records the config digest; CSV files carry it on a leading
// "# config_digest: ..." line.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "pnrtomo/pipeline.h"

namespace pnrtomo {

/// Reads a configuration file. Throws IoError if unreadable and ConfigError
/// if malformed.
PipelineConfig load_config(const std::filesystem::path &path, PipelineConfig defaults = {});

/// The configuration embedded in <dir>/manifest.json.
PipelineConfig load_manifest_config(const std::filesystem::path &dir);

Json read_json_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

std::string shots_file_name(std::size_t d);

void cmd_simulate(const PipelineConfig &c);
void cmd_classify(const PipelineConfig &c);

/// Reconstructs from `stats_path` (default <output_dir>/stats.json). Returns
/// whether the solver converged; the outputs are written either way.
bool cmd_tomography(const PipelineConfig &c, const std::optional<std::filesystem::path> &stats_path = {});

/// Throws ConfigError if the inputs carry different config digests.
void cmd_report(const PipelineConfig &c);

}  // namespace pnrtomo
