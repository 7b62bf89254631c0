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

// Shot container, all fields little-endian:
//
//   offset  size  field
//        0     8  magic "PNRSHOT\0"
//        8     4  u32 version (1)
//       12     4  u32 record_length (samples per shot)
//       16     8  f64 sample_rate (Hz)
//       24     8  f64 t0 (s)
//       32     8  f64 mean_photon_number of the probe
//       40     8  u64 shot_count
//       48     8  u64 params digest
//       56     8  u64 config digest
//       64        records: u32 n, u32 m, record_length x f32 volts

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnrtomo/waveform_sim.h"

namespace pnrtomo {

inline constexpr std::uint32_t kShotFormatVersion = 1;
inline constexpr std::size_t kShotHeaderBytes = 64;

struct ShotHeader {
  std::uint32_t record_length = 0;
  double sample_rate = 0.0;
  double t0 = 0.0;
  double mean_photon_number = 0.0;
  std::uint64_t shot_count = 0;
  std::uint64_t params_digest = 0;
  std::uint64_t config_digest = 0;
};

struct ShotBatch {
  ShotHeader header;
  std::vector<Shot> shots;
};

/// Throws std::invalid_argument if the shots disagree on length or dt.
void write_shots(std::ostream &out, const std::vector<Shot> &shots, double mean_photon_number,
                 std::uint64_t params_digest, std::uint64_t config_digest);

/// Throws IoError on a bad magic, unknown version or truncated stream.
ShotBatch read_shots(std::istream &in);

void write_shots_file(const std::string &path, const std::vector<Shot> &shots,
                      double mean_photon_number, std::uint64_t params_digest,
                      std::uint64_t config_digest);
ShotBatch read_shots_file(const std::string &path);

/// One shot per row: index,n,m,s0,s1,...
std::string shots_to_csv(const std::vector<Shot> &shots);

}  // namespace pnrtomo
