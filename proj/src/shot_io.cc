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

#include "pnrtomo/shot_io.h"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "pnrtomo/errors.h"

namespace pnrtomo {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'N', 'R', 'S', 'H', 'O', 'T', '\0'};

template <typename U>
void put_le(std::string &buf, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(const unsigned char *p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

void put_f64(std::string &buf, double v) { put_le(buf, std::bit_cast<std::uint64_t>(v)); }
void put_f32(std::string &buf, float v) { put_le(buf, std::bit_cast<std::uint32_t>(v)); }
double get_f64(const unsigned char *p) { return std::bit_cast<double>(get_le<std::uint64_t>(p)); }
float get_f32(const unsigned char *p) { return std::bit_cast<float>(get_le<std::uint32_t>(p)); }

void read_exact(std::istream &in, unsigned char *dst, std::size_t n, const char *what) {
  in.read(reinterpret_cast<char *>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw IoError(std::string("shot container truncated while reading ") + what);
  }
}

}  // namespace

void write_shots(std::ostream &out, const std::vector<Shot> &shots, double mean_photon_number,
                 std::uint64_t params_digest, std::uint64_t config_digest) {
  if (shots.empty()) throw std::invalid_argument("write_shots: no shots");
  const Waveform &first = shots.front().waveform;
  const std::size_t length = first.samples.size();
  for (const Shot &s : shots) {
    if (s.waveform.samples.size() != length || s.waveform.dt != first.dt) {
      throw std::invalid_argument("write_shots: shots differ in length or sample spacing");
    }
  }

  std::string buf;
  buf.reserve(kShotHeaderBytes + shots.size() * (8 + 4 * length));
  buf.append(kMagic.data(), kMagic.size());
  put_le(buf, kShotFormatVersion);
  put_le(buf, static_cast<std::uint32_t>(length));
  put_f64(buf, 1.0 / first.dt);
  put_f64(buf, first.t0);
  put_f64(buf, mean_photon_number);
  put_le(buf, static_cast<std::uint64_t>(shots.size()));
  put_le(buf, params_digest);
  put_le(buf, config_digest);
  for (const Shot &s : shots) {
    put_le(buf, s.incident_photons);
    put_le(buf, s.detected_photons);
    for (double v : s.waveform.samples) put_f32(buf, static_cast<float>(v));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed to write shot container");
}

ShotBatch read_shots(std::istream &in) {
  std::array<unsigned char, kShotHeaderBytes> h{};
  read_exact(in, h.data(), h.size(), "header");
  if (std::memcmp(h.data(), kMagic.data(), kMagic.size()) != 0) {
    throw IoError("not a shot container (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(h.data() + 8);
  if (version != kShotFormatVersion) {
    throw IoError("unsupported shot container version " + std::to_string(version));
  }

  ShotBatch batch;
  ShotHeader &hd = batch.header;
  hd.record_length = get_le<std::uint32_t>(h.data() + 12);
  hd.sample_rate = get_f64(h.data() + 16);
  hd.t0 = get_f64(h.data() + 24);
  hd.mean_photon_number = get_f64(h.data() + 32);
  hd.shot_count = get_le<std::uint64_t>(h.data() + 40);
  hd.params_digest = get_le<std::uint64_t>(h.data() + 48);
  hd.config_digest = get_le<std::uint64_t>(h.data() + 56);
  if (hd.record_length == 0 || !(hd.sample_rate > 0.0)) throw IoError("shot container header is invalid");

  const std::size_t record_bytes = 8 + 4 * static_cast<std::size_t>(hd.record_length);
  std::vector<unsigned char> rec(record_bytes);
  batch.shots.reserve(hd.shot_count);
  for (std::uint64_t i = 0; i < hd.shot_count; ++i) {
    read_exact(in, rec.data(), record_bytes, "records");
    Shot s;
    s.incident_photons = get_le<std::uint32_t>(rec.data());
    s.detected_photons = get_le<std::uint32_t>(rec.data() + 4);
    s.waveform.dt = 1.0 / hd.sample_rate;
    s.waveform.t0 = hd.t0;
    s.waveform.samples.resize(hd.record_length);
    for (std::uint32_t k = 0; k < hd.record_length; ++k) {
      s.waveform.samples[k] = get_f32(rec.data() + 8 + 4 * k);
    }
    batch.shots.push_back(std::move(s));
  }
  return batch;
}

void write_shots_file(const std::string &path, const std::vector<Shot> &shots,
                      double mean_photon_number, std::uint64_t params_digest,
                      std::uint64_t config_digest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_shots(out, shots, mean_photon_number, params_digest, config_digest);
}

ShotBatch read_shots_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_shots(in);
}

std::string shots_to_csv(const std::vector<Shot> &shots) {
  std::string out = "index,n,m";
  const std::size_t length = shots.empty() ? 0 : shots.front().waveform.samples.size();
  for (std::size_t k = 0; k < length; ++k) out += ",s" + std::to_string(k);
  out += '\n';
  for (std::size_t i = 0; i < shots.size(); ++i) {
    out += std::to_string(i) + ',' + std::to_string(shots[i].incident_photons) + ',' +
           std::to_string(shots[i].detected_photons);
    for (double v : shots[i].waveform.samples) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

}  // namespace pnrtomo
