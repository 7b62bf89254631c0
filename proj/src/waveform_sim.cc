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

#include "pnrtomo/waveform_sim.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "pnrtomo/errors.h"

namespace pnrtomo {

namespace {

void require_positive(double v, const char *field) {
  if (!(v > 0.0) || std::isnan(v)) throw ConfigError(field, "must be > 0");
}

void require_nonnegative(double v, const char *field) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be finite and >= 0");
}

}  // namespace

void DetectorParams::validate() const {
  require_positive(kinetic_inductance, "kinetic_inductance");
  require_positive(load_resistance, "load_resistance");
  require_positive(hotspot_resistance_per_photon, "hotspot_resistance_per_photon");
  require_positive(hotspot_duration, "hotspot_duration");
  require_positive(bias_current, "bias_current");
  require_positive(amplifier_gain, "amplifier_gain");
  require_positive(analog_bandwidth, "analog_bandwidth");
  require_positive(sample_rate, "sample_rate");
  require_nonnegative(noise_sigma, "noise_sigma");
  require_nonnegative(jitter_sigma, "jitter_sigma");
  require_nonnegative(arrival_time, "arrival_time");
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ConfigError("efficiency", "must lie in [0, 1]");
  if (record_length < 1) throw ConfigError("record_length", "must be >= 1");
  if (!(power_calibration_error > -1.0) || !std::isfinite(power_calibration_error)) {
    throw ConfigError("power_calibration_error", "must be finite and > -1");
  }
}

Json detector_params_to_json(const DetectorParams &p) {
  Json j{{"kinetic_inductance", p.kinetic_inductance},
         {"load_resistance", p.load_resistance},
         {"hotspot_resistance_per_photon", p.hotspot_resistance_per_photon},
         {"hotspot_duration", p.hotspot_duration},
         {"bias_current", p.bias_current},
         {"efficiency", p.efficiency},
         {"amplifier_gain", p.amplifier_gain},
         {"noise_sigma", p.noise_sigma},
         {"jitter_sigma", p.jitter_sigma},
         {"sample_rate", p.sample_rate},
         {"record_length", p.record_length},
         {"arrival_time", p.arrival_time},
         {"power_calibration_error", p.power_calibration_error}};
  // JSON has no infinity; null means an ideal, unfiltered chain.
  j["analog_bandwidth"] = std::isinf(p.analog_bandwidth) ? Json(nullptr) : Json(p.analog_bandwidth);
  return j;
}

DetectorParams detector_params_from_json(const Json &j, DetectorParams p) {
  if (!j.is_object()) throw ConfigError("detector", "expected an object");
  auto read = [&](const char *key, double &field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw ConfigError(key, "expected a number");
    field = j[key].get<double>();
  };
  read("kinetic_inductance", p.kinetic_inductance);
  read("load_resistance", p.load_resistance);
  read("hotspot_resistance_per_photon", p.hotspot_resistance_per_photon);
  read("hotspot_duration", p.hotspot_duration);
  read("bias_current", p.bias_current);
  read("efficiency", p.efficiency);
  read("amplifier_gain", p.amplifier_gain);
  read("noise_sigma", p.noise_sigma);
  read("jitter_sigma", p.jitter_sigma);
  read("sample_rate", p.sample_rate);
  read("arrival_time", p.arrival_time);
  read("power_calibration_error", p.power_calibration_error);
  if (j.contains("analog_bandwidth")) {
    if (j["analog_bandwidth"].is_null()) {
      p.analog_bandwidth = std::numeric_limits<double>::infinity();
    } else {
      read("analog_bandwidth", p.analog_bandwidth);
    }
  }
  if (j.contains("record_length")) {
    if (!is_count(j["record_length"])) {
      throw ConfigError("record_length", "expected a positive integer");
    }
    p.record_length = j["record_length"].get<std::size_t>();
  }
  p.validate();
  return p;
}

std::uint64_t params_digest(const DetectorParams &p) {
  return fnv1a64(detector_params_to_json(p).dump());
}

void Waveform::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("Waveform: dt must be > 0");
  if (samples.empty()) throw std::invalid_argument("Waveform: no samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw std::invalid_argument("Waveform: non-finite sample");
  }
}

std::uint32_t sample_incident_photons(const CoherentProbe &probe, Rng &rng) {
  const double mean = probe.mean_photon_number();
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::uint32_t> dist(mean);
  return dist(rng);
}

std::uint32_t thin_by_efficiency(std::uint32_t n, double efficiency, Rng &rng) {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw std::domain_error("thin_by_efficiency: efficiency must lie in [0, 1]");
  }
  if (n == 0 || efficiency == 0.0) return 0;
  if (efficiency == 1.0) return n;
  std::binomial_distribution<std::uint32_t> dist(n, efficiency);
  return dist(rng);
}

double signal_current(std::uint32_t m, double t, const DetectorParams &p) {
  const double since = t - p.arrival_time;
  if (m == 0 || since < 0.0) return 0.0;
  const double hotspot = static_cast<double>(m) * p.hotspot_resistance_per_photon;
  const double open_total = p.load_resistance + hotspot;
  const double asymptote = p.bias_current * hotspot / open_total;
  const double tau_open = p.kinetic_inductance / open_total;
  if (since < p.hotspot_duration) return -asymptote * std::expm1(-since / tau_open);
  const double at_close = -asymptote * std::expm1(-p.hotspot_duration / tau_open);
  const double tau_closed = p.kinetic_inductance / p.load_resistance;
  return at_close * std::exp(-(since - p.hotspot_duration) / tau_closed);
}

double circuit_voltage(std::uint32_t m, double t, const DetectorParams &p) {
  return signal_current(m, t, p) * p.load_resistance * p.amplifier_gain;
}

double onset_slope(std::uint32_t m, const DetectorParams &p) {
  return p.amplifier_gain * p.load_resistance * p.bias_current * static_cast<double>(m) *
         p.hotspot_resistance_per_photon / p.kinetic_inductance;
}

CircuitCurrents circuit_currents(std::uint32_t m, const DetectorParams &p) {
  CircuitCurrents c;
  c.detector.resize(p.record_length);
  c.signal.resize(p.record_length);
  for (std::size_t i = 0; i < p.record_length; ++i) {
    c.signal[i] = signal_current(m, static_cast<double>(i) * p.dt(), p);
    c.detector[i] = p.bias_current - c.signal[i];
  }
  return c;
}

Waveform circuit_response(std::uint32_t m, const DetectorParams &p) {
  Waveform w;
  w.dt = p.dt();
  w.t0 = 0.0;
  w.samples.resize(p.record_length);
  for (std::size_t i = 0; i < p.record_length; ++i) w.samples[i] = circuit_voltage(m, w.time(i), p);
  return w;
}

Waveform low_pass(const Waveform &w, double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("low_pass: bandwidth must be > 0");
  Waveform out = w;
  if (std::isinf(bandwidth)) return out;
  // Exact discretization of dy/dt = 2 pi B (x - y) for a held input.
  const double decay = std::exp(-2.0 * std::numbers::pi * bandwidth * w.dt);
  double y = 0.0;
  for (double &s : out.samples) {
    y = decay * y + (1.0 - decay) * s;
    s = y;
  }
  return out;
}

Waveform delay(const Waveform &w, double shift) {
  Waveform out = w;
  const std::size_t n = w.samples.size();
  if (shift == 0.0 || n == 0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = static_cast<double>(i) - shift / w.dt;
    if (pos <= 0.0) {
      out.samples[i] = w.samples.front();
    } else if (pos >= static_cast<double>(n - 1)) {
      out.samples[i] = w.samples.back();
    } else {
      const auto lo = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(lo);
      out.samples[i] = (1.0 - frac) * w.samples[lo] + frac * w.samples[lo + 1];
    }
  }
  return out;
}

Waveform apply_analog_chain(const Waveform &w, const DetectorParams &p, Rng &rng) {
  Waveform out = low_pass(w, p.analog_bandwidth);
  if (p.jitter_sigma > 0.0) {
    std::normal_distribution<double> jitter(0.0, p.jitter_sigma);
    out = delay(out, jitter(rng));
  }
  if (p.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, p.noise_sigma);
    for (double &s : out.samples) s += noise(rng);
  }
  return out;
}

std::vector<Shot> run_experiment(const CoherentProbe &probe, std::size_t shots,
                                 const DetectorParams &params, std::uint64_t seed,
                                 unsigned threads) {
  if (shots < 1) throw std::invalid_argument("run_experiment: shots must be >= 1");
  params.validate();
  const CoherentProbe actual(probe.mean_photon_number() * (1.0 + params.power_calibration_error));
  constexpr std::uint64_t kShotStream = stream_id("shot");

  // Noiseless responses depend only on m. The cache is filled up front so
  // workers only read it; counts beyond it are solved directly.
  const double mean = actual.mean_photon_number();
  const auto cached = static_cast<std::uint32_t>(mean + 40.0 * std::sqrt(mean) + 40.0);
  std::vector<Waveform> responses;
  responses.reserve(cached + 1);
  for (std::uint32_t m = 0; m <= cached; ++m) responses.push_back(circuit_response(m, params));

  std::vector<Shot> out(shots);
  auto simulate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = substream(seed, kShotStream, i);
      Shot &s = out[i];
      s.incident_photons = sample_incident_photons(actual, rng);
      s.detected_photons = thin_by_efficiency(s.incident_photons, params.efficiency, rng);
      const Waveform clean = s.detected_photons < responses.size()
                                 ? responses[s.detected_photons]
                                 : circuit_response(s.detected_photons, params);
      s.waveform = apply_analog_chain(clean, params, rng);
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1 || shots < 1024) {
    simulate(0, shots);
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (shots + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(shots, t * chunk);
      const std::size_t end = std::min(shots, begin + chunk);
      if (begin < end) workers.emplace_back(simulate, begin, end);
    }
    for (auto &w : workers) w.join();
  }
  return out;
}

}  // namespace pnrtomo
