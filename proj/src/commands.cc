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

#include "pnrtomo/commands.h"

#include <fstream>
#include <sstream>

#include "pnrtomo/errors.h"
#include "pnrtomo/shot_io.h"
#include "pnrtomo/svg.h"

namespace pnrtomo {

namespace fs = std::filesystem;

namespace {

constexpr int kManifestVersion = 1;

std::string with_digest(const std::string &csv, const std::string &digest) {
  return "# config_digest: " + digest + "\n" + csv;
}

/// Two-digit probe index, wider when needed.
std::string probe_suffix(std::size_t d) {
  std::string s = std::to_string(d);
  return s.size() < 2 ? "0" + s : s;
}

void ensure_dir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string digest_of(const Json &j, const fs::path &path) {
  if (!j.contains("config_digest") || !j["config_digest"].is_string()) {
    throw IoError(path.string() + " has no config_digest");
  }
  return j["config_digest"].get<std::string>();
}

void require_digest(const Json &j, const fs::path &path, const std::string &expected) {
  const std::string found = digest_of(j, path);
  if (found != expected) {
    throw ConfigError("config_digest", path.string() + " was produced by configuration " + found +
                                           ", expected " + expected);
  }
}

}  // namespace

Json read_json_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw ConfigError(path.string(), e.what());
  }
}

void write_text_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed to write " + path.string());
}

PipelineConfig load_config(const fs::path &path, PipelineConfig defaults) {
  return pipeline_config_from_json(read_json_file(path), std::move(defaults));
}

PipelineConfig load_manifest_config(const fs::path &dir) {
  const fs::path path = dir / "manifest.json";
  const Json manifest = read_json_file(path);
  if (!manifest.contains("config")) throw IoError(path.string() + " has no config");
  PipelineConfig c = pipeline_config_from_json(manifest["config"]);
  c.output_dir = dir.string();
  return c;
}

std::string shots_file_name(std::size_t d) { return "shots-" + probe_suffix(d) + ".bin"; }

void cmd_simulate(const PipelineConfig &c) {
  c.validate();
  const fs::path dir(c.output_dir);
  ensure_dir(dir);
  const std::uint64_t digest = config_digest(c);
  const std::uint64_t pdigest = params_digest(c.detector);
  Json files = Json::array();
  for (std::size_t d = 0; d < c.probes.size(); ++d) {
    const std::vector<Shot> shots = simulate_probe(c, d);
    const std::string name = shots_file_name(d);
    write_shots_file((dir / name).string(), shots, c.probes[d], pdigest, digest);
    files.push_back(Json{{"file", name}, {"mean_photon_number", c.probes[d]}, {"shots", shots.size()},
                         {"seed", probe_seed(c, d)}});
  }
  const Json manifest{{"format_version", kManifestVersion},
                      {"config_digest", digest_hex(digest)},
                      {"params_digest", digest_hex(pdigest)},
                      {"seed", c.seed},
                      {"reference_probe_index", reference_probe_index(c)},
                      {"shot_files", files},
                      {"config", pipeline_config_to_json(c)}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

namespace {

ShotBatch read_probe_shots(const PipelineConfig &c, std::size_t d, std::uint64_t digest) {
  const fs::path path = fs::path(c.output_dir) / shots_file_name(d);
  if (!fs::exists(path)) throw IoError("missing shot file " + path.string());
  ShotBatch batch = read_shots_file(path.string());
  if (batch.header.config_digest != digest) {
    throw ConfigError("config_digest", path.string() + " was produced by configuration " +
                                           digest_hex(batch.header.config_digest) + ", expected " +
                                           digest_hex(digest));
  }
  return batch;
}

}  // namespace

void cmd_classify(const PipelineConfig &c) {
  c.validate();
  const fs::path dir(c.output_dir);
  const std::uint64_t digest = config_digest(c);
  const std::string hex = digest_hex(digest);
  require_digest(read_json_file(dir / "manifest.json"), dir / "manifest.json", hex);

  const std::size_t d_ref = reference_probe_index(c);
  std::optional<ShotBatch> reference = read_probe_shots(c, d_ref, digest);
  const ReferenceSet refs = build_references(reference->shots, c.classifier);
  Json refs_json = reference_set_to_json(refs);
  refs_json["config_digest"] = hex;
  refs_json["reference_probe"] = c.probes[d_ref];
  refs_json["method"] = to_string(c.classifier.reference_method);
  write_text_file(dir / "references.json", refs_json.dump(2) + "\n");

  const std::size_t D = c.probes.size();
  const auto N = static_cast<Eigen::Index>(c.outcomes());
  ClassifiedStatistics stats;
  stats.probes = c.probes;
  stats.pattern.resize(static_cast<Eigen::Index>(D), N);
  stats.single_point.resize(static_cast<Eigen::Index>(D), N);
  for (std::size_t d = 0; d < D; ++d) {
    ShotBatch batch = d == d_ref ? std::move(*reference) : read_probe_shots(c, d, digest);
    const ProbeClassification pc = classify_probe(batch.shots, refs, c);
    for (Eigen::Index n = 0; n < N; ++n) {
      stats.pattern(static_cast<Eigen::Index>(d), n) = pc.pattern_frequencies[static_cast<std::size_t>(n)];
      stats.single_point(static_cast<Eigen::Index>(d), n) =
          pc.single_point_frequencies[static_cast<std::size_t>(n)];
    }
    stats.pattern_error_rate.push_back(pc.pattern_error_rate);
    stats.single_point_error_rate.push_back(pc.single_point_error_rate);
    stats.shot_counts.push_back(batch.shots.size());
    const std::string suffix = probe_suffix(d) + ".csv";
    write_text_file(dir / ("labels-" + suffix), with_digest(classification_to_csv(pc.batch), hex));
    write_text_file(dir / ("labels-single-point-" + suffix), with_digest(single_point_to_csv(pc.batch), hex));
  }

  Json stats_json = classified_statistics_to_json(stats);
  stats_json["config_digest"] = hex;
  stats_json["truncation"] = c.truncation;
  write_text_file(dir / "stats.json", stats_json.dump(2) + "\n");
  write_text_file(dir / "stats.csv", with_digest(statistics_to_csv(stats.pattern_statistics(), stats.probes), hex));
  Json single_json = statistics_to_json(stats.single_point_statistics(), stats.probes, c.truncation);
  single_json["config_digest"] = hex;
  write_text_file(dir / "stats-single-point.json", single_json.dump(2) + "\n");
  write_text_file(dir / "stats-single-point.csv",
                  with_digest(statistics_to_csv(stats.single_point_statistics(), stats.probes), hex));
}

bool cmd_tomography(const PipelineConfig &c, const std::optional<fs::path> &stats_path) {
  c.validate();
  const fs::path dir(c.output_dir);
  const fs::path input = stats_path.value_or(dir / "stats.json");
  const Json j = read_json_file(input);
  const LoadedStatistics loaded = statistics_from_json(j);
  if (loaded.stats.outcomes() != c.outcomes()) {
    throw ShapeError("statistics have " + std::to_string(loaded.stats.outcomes()) + " outcomes, configuration has " +
                     std::to_string(c.outcomes()));
  }
  const ProbeMatrix F(make_probes(loaded.probes), c.truncation);
  auto [povm, report] = reconstruct(loaded.stats, F, c.solver);

  ensure_dir(dir);
  const std::string hex = digest_hex(config_digest(c));
  Json out = povm_to_json(povm);
  out["config_digest"] = hex;
  out["statistics_digest"] = j.value("config_digest", "");
  out["probes"] = loaded.probes;
  out["solver_report"] = solver_report_to_json(report);
  write_text_file(dir / "povm.json", out.dump(2) + "\n");
  write_text_file(dir / "povm.csv", with_digest(povm_to_csv(povm), hex));
  return report.converged;
}

void cmd_report(const PipelineConfig &c) {
  c.validate();
  const fs::path dir(c.output_dir);
  const std::string hex = digest_hex(config_digest(c));
  const Json manifest = read_json_file(dir / "manifest.json");
  const Json refs = read_json_file(dir / "references.json");
  const Json stats_json = read_json_file(dir / "stats.json");
  const Json povm_json = read_json_file(dir / "povm.json");
  require_digest(manifest, dir / "manifest.json", hex);
  require_digest(refs, dir / "references.json", hex);
  require_digest(stats_json, dir / "stats.json", hex);
  require_digest(povm_json, dir / "povm.json", hex);

  const ClassifiedStatistics stats = classified_statistics_from_json(stats_json);
  const PovmMatrix povm = povm_from_json(povm_json);
  const SolverReport report = solver_report_from_json(povm_json.at("solver_report"));

  const Json summary = build_report(c, stats, povm, report);
  write_text_file(dir / "report.json", summary.dump(2) + "\n");
  write_text_file(dir / "statistics.svg", statistics_chart(summary));
  write_text_file(dir / "povm.svg", povm_chart(summary));
  write_text_file(dir / "errors.svg", error_chart(summary));
}

}  // namespace pnrtomo
