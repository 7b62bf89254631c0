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

// Synthetic single-shot detection waveforms.
//
// The nanostrip is a kinetic inductance L_k in series with a switchable
// resistance R_N, shunted by the load R_L and fed by a constant bias I_b.
// m simultaneous hotspots open the switch with R_N = m * R0 for a fixed
// duration, after which the strip is superconducting again:
//
//     L_k dI_det/dt = (I_b - I_det) R_L - I_det R_N(t),   I_det(0) = I_b
//
// Each phase is linear with constant coefficients and is solved in closed
// form. The readout voltage is (I_b - I_det) R_L times the amplifier gain.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pnrtomo/povm.h"
#include "pnrtomo/povm_io.h"
#include "pnrtomo/rng.h"

namespace pnrtomo {

struct DetectorParams {
  double kinetic_inductance = 500e-9;         // H
  double load_resistance = 50.0;              // ohm
  double hotspot_resistance_per_photon = 1e3; // ohm
  double hotspot_duration = 150e-12;          // s
  double bias_current = 33.5e-6;              // A
  double efficiency = 0.547;
  double amplifier_gain = 6.27;               // puts the m=1 plateau near 10 mV
  double analog_bandwidth = 10e9;             // Hz, +inf disables the low-pass
  double noise_sigma = 0.15e-3;               // V, after gain
  double jitter_sigma = 1e-12;                // s
  double sample_rate = 50e9;                  // Hz
  std::size_t record_length = 512;
  double arrival_time = 250e-12;              // s after the record start
  /// Fractional error of the probe power calibration. The simulated mean
  /// photon number is |alpha|^2 * (1 + error) while analysis uses |alpha|^2.
  double power_calibration_error = 0.0;

  double dt() const { return 1.0 / sample_rate; }

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

Json detector_params_to_json(const DetectorParams &p);
DetectorParams detector_params_from_json(const Json &j, DetectorParams defaults = {});

/// FNV-1a digest of the canonical JSON encoding.
std::uint64_t params_digest(const DetectorParams &p);

/// Uniformly sampled trace; sample i is at t0 + i * dt.
struct Waveform {
  std::vector<double> samples;
  double dt = 0.0;
  double t0 = 0.0;

  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  void validate() const;
};

struct Shot {
  std::uint32_t incident_photons = 0;  // n
  std::uint32_t detected_photons = 0;  // m, after loss
  Waveform waveform;
};

std::uint32_t sample_incident_photons(const CoherentProbe &probe, Rng &rng);

/// Binomial(n, efficiency).
std::uint32_t thin_by_efficiency(std::uint32_t n, double efficiency, Rng &rng);

/// Current diverted into the load at time t (the signal current I_s).
/// I_det = I_b - I_s.
double signal_current(std::uint32_t m, double t, const DetectorParams &params);

/// Noiseless output voltage at time t.
double circuit_voltage(std::uint32_t m, double t, const DetectorParams &params);

/// dV/dt just after the hotspots form: gain * R_L * I_b * m * R0 / L_k.
double onset_slope(std::uint32_t m, const DetectorParams &params);

struct CircuitCurrents {
  std::vector<double> detector;  // I_det
  std::vector<double> signal;    // I_s
};

CircuitCurrents circuit_currents(std::uint32_t m, const DetectorParams &params);

/// Noiseless, full-bandwidth waveform on the record grid. m = 0 is all zero.
Waveform circuit_response(std::uint32_t m, const DetectorParams &params);

/// Single-pole low-pass with corner `bandwidth`, zero initial state.
Waveform low_pass(const Waveform &w, double bandwidth);

/// Delays the trace by `delay` seconds with linear interpolation, holding
/// the end samples outside the record.
Waveform delay(const Waveform &w, double delay);

/// Low-pass, Gaussian timing jitter, then additive white Gaussian noise.
Waveform apply_analog_chain(const Waveform &w, const DetectorParams &params, Rng &rng);

/// `shots` independent shots. Shot i draws from substream(seed, "shot", i),
/// so the result does not depend on `threads`.
std::vector<Shot> run_experiment(const CoherentProbe &probe, std::size_t shots,
                                 const DetectorParams &params, std::uint64_t seed,
                                 unsigned threads = 1);

}  // namespace pnrtomo
