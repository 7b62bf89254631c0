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

#include "pnrtomo/povm_io.h"

#include <charconv>
#include <sstream>

#include "pnrtomo/errors.h"

namespace pnrtomo {

namespace {

Json matrix_rows(const Matrix &m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix rows_matrix(const Json &rows, const char *field) {
  if (!rows.is_array() || rows.empty()) throw ConfigError(field, "expected a nonempty array of rows");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) {
      throw ConfigError(field, "row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!rows[i][j].is_number()) throw ConfigError(field, "non-numeric entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

std::string header(std::string_view key, std::size_t outcomes) {
  std::string h(key);
  for (std::size_t n = 0; n < outcomes; ++n) h += ",n" + std::to_string(n);
  return h + "\n";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json povm_to_json(const PovmMatrix &povm) {
  return Json{{"truncation", povm.truncation()},
              {"outcomes", povm.outcomes()},
              {"overflow_outcome", povm.overflow_outcome()},
              {"entries", matrix_rows(povm.entries())}};
}

PovmMatrix povm_from_json(const Json &j) {
  if (!j.is_object()) throw ConfigError("povm", "expected a JSON object");
  Matrix m = rows_matrix(j.value("entries", Json()), "entries");
  if (j.contains("truncation") && j["truncation"].get<std::size_t>() != static_cast<std::size_t>(m.rows())) {
    throw ConfigError("truncation", "does not match the number of entry rows");
  }
  if (j.contains("outcomes") && j["outcomes"].get<std::size_t>() != static_cast<std::size_t>(m.cols())) {
    throw ConfigError("outcomes", "does not match the entry row length");
  }
  return PovmMatrix(std::move(m), j.value("overflow_outcome", true));
}

Json statistics_to_json(const StatisticsMatrix &stats, std::span<const double> probes,
                        std::optional<std::size_t> truncation, bool overflow_outcome) {
  if (probes.size() != stats.probes()) throw ShapeError("statistics_to_json: probe count mismatch");
  Json j{{"outcomes", stats.outcomes()},
         {"overflow_outcome", overflow_outcome},
         {"entries", matrix_rows(stats.entries())},
         {"probes", std::vector<double>(probes.begin(), probes.end())}};
  j["truncation"] = truncation ? Json(*truncation) : Json(nullptr);
  if (!stats.shot_counts().empty()) j["shot_counts"] = stats.shot_counts();
  return j;
}

LoadedStatistics statistics_from_json(const Json &j) {
  if (!j.is_object()) throw ConfigError("statistics", "expected a JSON object");
  Matrix m = rows_matrix(j.value("entries", Json()), "entries");
  if (!j.contains("probes") || !j["probes"].is_array()) throw ConfigError("probes", "missing");
  auto probes = j["probes"].get<std::vector<double>>();
  if (probes.size() != static_cast<std::size_t>(m.rows())) {
    throw ConfigError("probes", "length does not match the number of entry rows");
  }
  std::vector<std::uint64_t> counts;
  if (j.contains("shot_counts")) counts = j["shot_counts"].get<std::vector<std::uint64_t>>();
  std::optional<std::size_t> truncation;
  if (j.contains("truncation") && !j["truncation"].is_null()) truncation = j["truncation"].get<std::size_t>();
  return LoadedStatistics{StatisticsMatrix(std::move(m), std::move(counts)), std::move(probes),
                          truncation, j.value("overflow_outcome", true)};
}

std::string povm_to_csv(const PovmMatrix &povm) {
  std::ostringstream out;
  out << header("k", povm.outcomes());
  for (std::size_t k = 0; k < povm.truncation(); ++k) {
    out << k;
    for (std::size_t n = 0; n < povm.outcomes(); ++n) out << ',' << format_double(povm(k, n));
    out << '\n';
  }
  return out.str();
}

std::string statistics_to_csv(const StatisticsMatrix &stats, std::span<const double> probes) {
  if (probes.size() != stats.probes()) throw ShapeError("statistics_to_csv: probe count mismatch");
  std::ostringstream out;
  out << header("mean_photon_number", stats.outcomes());
  for (std::size_t i = 0; i < stats.probes(); ++i) {
    out << format_double(probes[i]);
    for (std::size_t n = 0; n < stats.outcomes(); ++n) {
      out << ',' << format_double(stats.entries()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace pnrtomo
