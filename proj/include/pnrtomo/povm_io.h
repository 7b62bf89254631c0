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

// JSON and CSV encodings of POVM and statistics matrices.
//
// JSON layout (both kinds):
//   { "truncation": M, "outcomes": N, "overflow_outcome": bool,
//     "entries": [[...], ...], "probes": [|alpha|^2, ...] }
// `entries` is row-major. For a POVM the rows are Fock states k and
// `probes` is omitted; for statistics the rows follow `probes`.
//
// CSV: a header row naming the columns n0..n{N-1}, preceded by a leading
// key column (`k` for POVMs, `mean_photon_number` for statistics).

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnrtomo/povm.h"

namespace pnrtomo {

using Json = nlohmann::json;

/// Non-negative integer, whether the parser stored it signed or unsigned.
inline bool is_count(const Json &v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

Json povm_to_json(const PovmMatrix &povm);
PovmMatrix povm_from_json(const Json &j);

/// `truncation` is recorded for the POVM the statistics are meant for; pass
/// nullopt when unknown.
Json statistics_to_json(const StatisticsMatrix &stats, std::span<const double> probes,
                        std::optional<std::size_t> truncation = std::nullopt,
                        bool overflow_outcome = true);

struct LoadedStatistics {
  StatisticsMatrix stats;
  std::vector<double> probes;
  std::optional<std::size_t> truncation;
  bool overflow_outcome = true;
};

LoadedStatistics statistics_from_json(const Json &j);

std::string povm_to_csv(const PovmMatrix &povm);
std::string statistics_to_csv(const StatisticsMatrix &stats, std::span<const double> probes);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace pnrtomo
