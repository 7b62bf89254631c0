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

#include "pnrtomo/povm.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pnrtomo/errors.h"

namespace pnrtomo {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_probability(double p, const char *what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

CoherentProbe::CoherentProbe(double mean_photon_number) : mean_(mean_photon_number) {
  if (!std::isfinite(mean_) || mean_ < 0.0) {
    throw std::domain_error("mean photon number must be finite and >= 0, got " +
                            std::to_string(mean_));
  }
}

std::vector<CoherentProbe> make_probes(std::span<const double> means) {
  std::vector<CoherentProbe> out;
  out.reserve(means.size());
  for (double m : means) out.emplace_back(m);
  return out;
}

double poisson_pmf(double mean, std::size_t k) {
  if (!(mean >= 0.0)) throw std::domain_error("poisson_pmf: mean must be >= 0");
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

std::vector<double> folded_poisson(double mean, std::size_t outcomes) {
  if (outcomes < 1) throw std::invalid_argument("folded_poisson: need at least one outcome");
  std::vector<double> out(outcomes, 0.0);
  double head = 0.0;
  for (std::size_t n = 0; n + 1 < outcomes; ++n) {
    out[n] = poisson_pmf(mean, n);
    head += out[n];
  }
  out.back() = std::max(0.0, 1.0 - head);
  return out;
}

double binomial_pmf(std::size_t k, std::size_t n, double p) {
  check_probability(p, "binomial_pmf: p");
  if (n > k) return 0.0;
  if (p == 0.0) return n == 0 ? 1.0 : 0.0;
  if (p == 1.0) return n == k ? 1.0 : 0.0;
  const double kd = static_cast<double>(k), nd = static_cast<double>(n);
  const double log_choose = std::lgamma(kd + 1.0) - std::lgamma(nd + 1.0) - std::lgamma(kd - nd + 1.0);
  return std::exp(log_choose + nd * std::log(p) + (kd - nd) * std::log1p(-p));
}

ProbeMatrix::ProbeMatrix(std::vector<CoherentProbe> probes, std::size_t truncation)
    : probes_(std::move(probes)) {
  if (probes_.empty()) throw std::invalid_argument("probe_matrix: no probes");
  if (truncation < 1) throw std::invalid_argument("probe_matrix: truncation must be >= 1");
  entries_.resize(idx(probes_.size()), idx(truncation));
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    for (std::size_t k = 0; k < truncation; ++k) {
      entries_(idx(i), idx(k)) = poisson_pmf(probes_[i].mean_photon_number(), k);
    }
  }
}

std::vector<double> ProbeMatrix::means() const {
  std::vector<double> out;
  out.reserve(probes_.size());
  for (const auto &p : probes_) out.push_back(p.mean_photon_number());
  return out;
}

ProbeMatrix probe_matrix(std::vector<CoherentProbe> probes, std::size_t truncation) {
  return ProbeMatrix(std::move(probes), truncation);
}

PovmMatrix::PovmMatrix(Matrix entries, bool overflow_outcome)
    : entries_(std::move(entries)), overflow_(overflow_outcome) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw std::invalid_argument("PovmMatrix: empty matrix");
  }
  for (Eigen::Index k = 0; k < entries_.rows(); ++k) {
    double sum = 0.0;
    for (Eigen::Index n = 0; n < entries_.cols(); ++n) {
      const double v = entries_(k, n);
      if (!std::isfinite(v) || v < -kFeasibilityTolerance) {
        throw std::domain_error("PovmMatrix: entry (" + std::to_string(k) + "," +
                                std::to_string(n) + ") is negative or non-finite");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kFeasibilityTolerance) {
      throw std::domain_error("PovmMatrix: row " + std::to_string(k) + " sums to " +
                              std::to_string(sum));
    }
  }
}

StatisticsMatrix::StatisticsMatrix(Matrix entries, std::vector<std::uint64_t> shot_counts)
    : entries_(std::move(entries)), shot_counts_(std::move(shot_counts)) {
  constexpr double tol = 1e-9;
  if (!shot_counts_.empty() && shot_counts_.size() != static_cast<std::size_t>(entries_.rows())) {
    throw ShapeError("StatisticsMatrix: shot_counts length does not match row count");
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index n = 0; n < entries_.cols(); ++n) {
      const double v = entries_(i, n);
      if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) {
        throw std::domain_error("StatisticsMatrix: entry (" + std::to_string(i) + "," +
                                std::to_string(n) + ") outside [0, 1]");
      }
    }
    if (entries_.row(i).sum() > 1.0 + tol) {
      throw std::domain_error("StatisticsMatrix: row " + std::to_string(i) + " sums above 1");
    }
  }
}

PhotonNumberDistribution::PhotonNumberDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::domain_error("PhotonNumberDistribution: negative or non-finite weight");
    }
    sum += w;
  }
  if (sum > 1.0 + 1e-12) throw std::domain_error("PhotonNumberDistribution: weights sum above 1");
}

PhotonNumberDistribution PhotonNumberDistribution::coherent(const CoherentProbe &probe,
                                                            std::size_t truncation) {
  std::vector<double> w(truncation);
  for (std::size_t k = 0; k < truncation; ++k) w[k] = poisson_pmf(probe.mean_photon_number(), k);
  return PhotonNumberDistribution(std::move(w));
}

PovmMatrix binomial_loss_povm(double efficiency, std::size_t outcomes, std::size_t truncation) {
  check_probability(efficiency, "binomial_loss_povm: efficiency");
  if (outcomes < 2) throw std::invalid_argument("binomial_loss_povm: need N >= 2");
  if (truncation < outcomes) throw std::invalid_argument("binomial_loss_povm: need M >= N");
  Matrix theta = Matrix::Zero(idx(truncation), idx(outcomes));
  for (std::size_t k = 0; k < truncation; ++k) {
    double head = 0.0;
    for (std::size_t n = 0; n + 1 < outcomes; ++n) {
      const double v = binomial_pmf(k, n, efficiency);
      theta(idx(k), idx(n)) = v;
      head += v;
    }
    theta(idx(k), idx(outcomes - 1)) = std::max(0.0, 1.0 - head);
  }
  return PovmMatrix(std::move(theta), true);
}

StatisticsMatrix detection_probabilities(const PovmMatrix &povm, const ProbeMatrix &probes) {
  if (povm.truncation() != probes.truncation()) {
    throw ShapeError("detection_probabilities: POVM truncation " +
                     std::to_string(povm.truncation()) + " != probe truncation " +
                     std::to_string(probes.truncation()));
  }
  Matrix p = probes.entries() * povm.entries();
  // Rounding can push a zero by an ulp below zero.
  p = p.cwiseMax(0.0).cwiseMin(1.0);
  return StatisticsMatrix(std::move(p));
}

std::vector<double> outcome_probabilities(const PovmMatrix &povm,
                                          const PhotonNumberDistribution &state) {
  if (state.weights().size() != povm.truncation()) {
    throw ShapeError("outcome_probabilities: state length != POVM truncation");
  }
  std::vector<double> out(povm.outcomes(), 0.0);
  for (std::size_t n = 0; n < povm.outcomes(); ++n) {
    for (std::size_t k = 0; k < povm.truncation(); ++k) out[n] += state.weights()[k] * povm(k, n);
  }
  return out;
}

PovmDistance povm_distance(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("povm_distance: shapes differ");
  }
  PovmDistance d;
  d.per_outcome.resize(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index n = 0; n < a.cols(); ++n) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.rows(); ++k) s += std::abs(a(k, n) - b(k, n));
    d.per_outcome[static_cast<std::size_t>(n)] = 0.5 * s;
    d.max = std::max(d.max, 0.5 * s);
  }
  return d;
}

PovmDistance povm_distance(const PovmMatrix &a, const PovmMatrix &b) {
  return povm_distance(a.entries(), b.entries());
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("total_variation: lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace pnrtomo
