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

// Photon-number-diagonal detector descriptions and the linear forward model
// P = F * Pi that maps probe states to detector outcome statistics.
//
// Row index k of a POVM is the Fock state |k>, column index n is the
// detector outcome. Only the diagonal of each POVM element is stored; the
// detector is assumed phase insensitive.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pnrtomo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Coherent state |alpha> described by its mean photon number |alpha|^2.
class CoherentProbe {
 public:
  /// Throws std::domain_error for negative or non-finite values.
  explicit CoherentProbe(double mean_photon_number);

  double mean_photon_number() const { return mean_; }

  friend bool operator==(const CoherentProbe &, const CoherentProbe &) = default;

 private:
  double mean_;
};

std::vector<CoherentProbe> make_probes(std::span<const double> means);

/// mean^k e^{-mean} / k!, evaluated in log space. Throws std::domain_error
/// for a negative mean.
double poisson_pmf(double mean, std::size_t k);

/// Poisson pmf for outcomes 0..outcomes-2; the last entry holds the whole
/// tail P(n >= outcomes-1).
std::vector<double> folded_poisson(double mean, std::size_t outcomes);

/// C(k, n) p^n (1-p)^(k-n), zero for n > k.
double binomial_pmf(std::size_t k, std::size_t n, double p);

/// D x M matrix of truncated Poisson rows, one per probe. Rows are not
/// renormalized: the deficit 1 - sum(row) is the tail beyond M-1.
class ProbeMatrix {
 public:
  ProbeMatrix(std::vector<CoherentProbe> probes, std::size_t truncation);

  const Matrix &entries() const { return entries_; }
  const std::vector<CoherentProbe> &probes() const { return probes_; }
  std::size_t truncation() const { return static_cast<std::size_t>(entries_.cols()); }
  std::size_t size() const { return probes_.size(); }
  std::vector<double> means() const;

 private:
  std::vector<CoherentProbe> probes_;
  Matrix entries_;
};

ProbeMatrix probe_matrix(std::vector<CoherentProbe> probes, std::size_t truncation);

/// M x N matrix of diagonal POVM elements theta_k^(n).
///
/// Construction checks nonnegativity and row completeness (each row sums to
/// one) to within `kFeasibilityTolerance`. When `overflow_outcome` is set the
/// last column stands for every photon number >= N-1.
class PovmMatrix {
 public:
  static constexpr double kFeasibilityTolerance = 1e-9;

  PovmMatrix(Matrix entries, bool overflow_outcome);

  const Matrix &entries() const { return entries_; }
  std::size_t truncation() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t outcomes() const { return static_cast<std::size_t>(entries_.cols()); }
  bool overflow_outcome() const { return overflow_; }
  double operator()(std::size_t k, std::size_t n) const {
    return entries_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  }

 private:
  Matrix entries_;
  bool overflow_;
};

/// D x N matrix of outcome frequencies, one row per probe.
///
/// Entries must lie in [0, 1] and rows may not exceed one. Rows produced by
/// the forward model may fall short of one by the probe truncation deficit;
/// rows built from counted shots sum to one.
class StatisticsMatrix {
 public:
  StatisticsMatrix(Matrix entries, std::vector<std::uint64_t> shot_counts = {});

  const Matrix &entries() const { return entries_; }
  const std::vector<std::uint64_t> &shot_counts() const { return shot_counts_; }
  std::size_t probes() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t outcomes() const { return static_cast<std::size_t>(entries_.cols()); }

 private:
  Matrix entries_;
  std::vector<std::uint64_t> shot_counts_;
};

/// Diagonal of a density matrix in the Fock basis, truncated at M.
class PhotonNumberDistribution {
 public:
  explicit PhotonNumberDistribution(std::vector<double> weights);

  static PhotonNumberDistribution coherent(const CoherentProbe &probe, std::size_t truncation);

  const std::vector<double> &weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

/// Binomial-loss model of a detector with per-photon efficiency `efficiency`.
/// Columns 0..N-2 hold C(k,n) eta^n (1-eta)^(k-n); the last column is the
/// overflow bucket and absorbs the remainder of each row.
PovmMatrix binomial_loss_povm(double efficiency, std::size_t outcomes, std::size_t truncation);

/// F * Pi. Throws ShapeError when truncations differ.
StatisticsMatrix detection_probabilities(const PovmMatrix &povm, const ProbeMatrix &probes);

/// p_n = tr[rho pi_n] for a phase-insensitive state.
std::vector<double> outcome_probabilities(const PovmMatrix &povm,
                                          const PhotonNumberDistribution &state);

struct PovmDistance {
  std::vector<double> per_outcome;  // total variation per column
  double max = 0.0;
};

/// Column-wise total variation distance 1/2 sum_k |a_kn - b_kn|.
PovmDistance povm_distance(const Matrix &a, const Matrix &b);
PovmDistance povm_distance(const PovmMatrix &a, const PovmMatrix &b);

/// 1/2 sum |p - q|.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace pnrtomo
