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

#include <cmath>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"

#include "oracles.h"
#include "pnrtomo/errors.h"
#include "pnrtomo/povm_io.h"

using namespace pnrtomo;
using pnrtomo::testing::binomial_by_product;
using pnrtomo::testing::folded_poisson_oracle;
using pnrtomo::testing::poisson_by_recurrence;
using pnrtomo::testing::thinned_by_summation;

TEST(Poisson, pmf_values) {
  EXPECT_EQ(poisson_pmf(0.0, 0), 1.0);
  EXPECT_EQ(poisson_pmf(0.0, 3), 0.0);
  EXPECT_NEAR(poisson_pmf(1.0, 0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(poisson_pmf(5.7, 5), std::pow(5.7, 5) * std::exp(-5.7) / 120.0, 1e-15);
  EXPECT_NEAR(poisson_pmf(5.7, 5), 0.167770, 1e-6);
  EXPECT_THROW(poisson_pmf(-1.0, 0), std::domain_error);
}

TEST(Poisson, pmf_agrees_with_recurrence_up_to_large_k) {
  for (double mean : {0.3, 1.0, 3.1179, 5.7, 6.0}) {
    const auto ref = poisson_by_recurrence(mean, 70);
    for (std::size_t k = 0; k < 70; ++k) {
      EXPECT_NEAR(poisson_pmf(mean, k), ref[k], 1e-14 + 1e-12 * ref[k]) << mean << " " << k;
    }
  }
}

TEST(Poisson, folded_tail_goes_to_last_outcome) {
  const auto p = folded_poisson(3.1179, 7);
  const auto ref = folded_poisson_oracle(3.1179, 7);
  ASSERT_EQ(p.size(), 7u);
  double sum = 0.0;
  for (std::size_t n = 0; n < 7; ++n) {
    EXPECT_NEAR(p[n], ref[n], 1e-14);
    sum += p[n];
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(ProbeMatrix, vacuum_and_unit_mean_rows) {
  const ProbeMatrix vac(make_probes(std::vector<double>{0.0}), 3);
  EXPECT_EQ(vac.entries()(0, 0), 1.0);
  EXPECT_EQ(vac.entries()(0, 1), 0.0);
  EXPECT_EQ(vac.entries()(0, 2), 0.0);

  const ProbeMatrix one(make_probes(std::vector<double>{1.0}), 3);
  EXPECT_NEAR(one.entries()(0, 0), 0.3679, 1e-4);
  EXPECT_NEAR(one.entries()(0, 1), 0.3679, 1e-4);
  EXPECT_NEAR(one.entries()(0, 2), 0.1839, 1e-4);
}

TEST(ProbeMatrix, bright_probe_row_is_complete_at_70) {
  const ProbeMatrix F(make_probes(std::vector<double>{5.7}), 70);
  EXPECT_NEAR(F.entries().row(0).sum(), 1.0, 1e-12);
}

TEST(ProbeMatrix, consecutive_ratios_are_poisson) {
  const std::vector<double> means{0.3, 0.9, 2.5, 4.4, 6.0};
  const ProbeMatrix F(make_probes(means), 40);
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (Eigen::Index k = 0; k + 1 < 40; ++k) {
      const double a = F.entries()(static_cast<Eigen::Index>(i), k);
      const double b = F.entries()(static_cast<Eigen::Index>(i), k + 1);
      if (a <= 0.0) continue;
      EXPECT_NEAR(b / a, means[i] / static_cast<double>(k + 1), 1e-12 * means[i]);
    }
  }
}

TEST(ProbeMatrix, rejects_bad_probes) {
  EXPECT_THROW(CoherentProbe(-0.1), std::domain_error);
  EXPECT_THROW(CoherentProbe(std::nan("")), std::domain_error);
  EXPECT_THROW(ProbeMatrix({}, 5), std::invalid_argument);
}

TEST(BinomialLoss, lossless_detector_is_a_relabeling) {
  const PovmMatrix pi = binomial_loss_povm(1.0, 4, 8);
  for (std::size_t k = 0; k < 8; ++k) {
    for (std::size_t n = 0; n < 4; ++n) {
      EXPECT_EQ(pi(k, n), n == std::min<std::size_t>(k, 3) ? 1.0 : 0.0) << k << " " << n;
    }
  }
}

TEST(BinomialLoss, single_and_two_photon_rows) {
  const PovmMatrix pi = binomial_loss_povm(0.547, 7, 70);
  EXPECT_NEAR(pi(1, 1), 0.547, 1e-15);
  EXPECT_NEAR(pi(2, 1), 2 * 0.547 * 0.453, 1e-15);
  EXPECT_NEAR(pi(2, 1), 0.495582, 1e-6);
  EXPECT_TRUE(pi.overflow_outcome());
}

TEST(BinomialLoss, entries_match_product_formula) {
  const PovmMatrix pi = binomial_loss_povm(0.37, 5, 30);
  for (std::size_t k = 0; k < 30; ++k) {
    double head = 0.0;
    for (std::size_t n = 0; n < 4; ++n) {
      const double b = binomial_by_product(k, n, 0.37);
      EXPECT_NEAR(pi(k, n), b, 1e-13);
      head += b;
    }
    EXPECT_NEAR(pi(k, 4), 1.0 - head, 1e-13);
  }
}

TEST(BinomialLoss, rows_are_probability_vectors_for_random_parameters) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> outcomes(2, 9), extra(0, 70);
  for (int trial = 0; trial < 200; ++trial) {
    const double eta = trial == 0 ? 0.0 : trial == 1 ? 1.0 : u(rng);
    const std::size_t N = outcomes(rng);
    const PovmMatrix pi = binomial_loss_povm(eta, N, N + extra(rng));
    for (Eigen::Index k = 0; k < pi.entries().rows(); ++k) {
      EXPECT_NEAR(pi.entries().row(k).sum(), 1.0, 1e-14);
      EXPECT_GE(pi.entries().row(k).minCoeff(), 0.0);
      EXPECT_LE(pi.entries().row(k).maxCoeff(), 1.0);
    }
  }
}

TEST(BinomialLoss, rejects_efficiency_outside_unit_interval) {
  EXPECT_ANY_THROW(binomial_loss_povm(-0.01, 7, 70));
  EXPECT_ANY_THROW(binomial_loss_povm(1.01, 7, 70));
}

TEST(PovmMatrix, construction_checks_feasibility) {
  Matrix ok(2, 2);
  ok << 1.0, 0.0, 0.25, 0.75;
  EXPECT_NO_THROW(PovmMatrix(ok, true));
  Matrix short_row = ok;
  short_row(1, 1) = 0.5;
  EXPECT_ANY_THROW(PovmMatrix(short_row, true));
  Matrix negative = ok;
  negative(1, 0) = -0.25;
  negative(1, 1) = 1.25;
  EXPECT_ANY_THROW(PovmMatrix(negative, true));
}

TEST(DetectionProbabilities, lossless_detector_reports_input_statistics) {
  const ProbeMatrix F(make_probes(std::vector<double>{1.0}), 40);
  const StatisticsMatrix P = detection_probabilities(binomial_loss_povm(1.0, 5, 40), F);
  const auto ref = folded_poisson_oracle(1.0, 5);
  for (std::size_t n = 0; n < 5; ++n) EXPECT_NEAR(P.entries()(0, static_cast<Eigen::Index>(n)), ref[n], 1e-14);
}

TEST(DetectionProbabilities, thinning_matches_brute_force_sum) {
  const std::vector<double> means{0.5, 2.0, 5.7};
  const ProbeMatrix F(make_probes(means), 70);
  for (double eta : {0.25, 0.547, 1.0}) {
    const StatisticsMatrix P = detection_probabilities(binomial_loss_povm(eta, 7, 70), F);
    for (std::size_t d = 0; d < means.size(); ++d) {
      const auto brute = thinned_by_summation(means[d], eta, 7, 70);
      const auto closed = folded_poisson_oracle(eta * means[d], 7);
      for (std::size_t n = 0; n < 7; ++n) {
        const double v = P.entries()(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
        EXPECT_NEAR(v, brute[n], 1e-13);
        EXPECT_NEAR(v, closed[n], 1e-10);
      }
    }
  }
}

TEST(DetectionProbabilities, five_detected_photons_at_bright_probe) {
  const ProbeMatrix F(make_probes(std::vector<double>{5.7}), 70);
  const StatisticsMatrix P = detection_probabilities(binomial_loss_povm(0.547, 7, 70), F);
  EXPECT_NEAR(P.entries()(0, 5), std::pow(3.1179, 5) * std::exp(-3.1179) / 120.0, 1e-12);
  EXPECT_NEAR(P.entries()(0, 5), 0.108653, 1e-6);
}

TEST(DetectionProbabilities, linear_in_the_povm) {
  const ProbeMatrix F(make_probes(std::vector<double>{0.3, 1.7, 4.2}), 30);
  const PovmMatrix a = binomial_loss_povm(0.3, 6, 30);
  const PovmMatrix b = binomial_loss_povm(0.8, 6, 30);
  for (double w : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    const PovmMatrix mix(w * a.entries() + (1.0 - w) * b.entries(), true);
    const Matrix lhs = detection_probabilities(mix, F).entries();
    const Matrix rhs = w * detection_probabilities(a, F).entries() + (1.0 - w) * detection_probabilities(b, F).entries();
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(DetectionProbabilities, truncation_mismatch_is_a_shape_error) {
  const ProbeMatrix F(make_probes(std::vector<double>{1.0}), 20);
  EXPECT_THROW(detection_probabilities(binomial_loss_povm(0.5, 3, 21), F), ShapeError);
}

TEST(PovmDistance, identical_and_disjoint) {
  Matrix x(2, 2);
  x << 1.0, 0.0, 0.0, 1.0;
  const PovmDistance same = povm_distance(x, x);
  EXPECT_EQ(same.max, 0.0);
  EXPECT_EQ(same.per_outcome, (std::vector<double>{0.0, 0.0}));

  Matrix y(2, 2);
  y << 0.0, 1.0, 1.0, 0.0;
  EXPECT_DOUBLE_EQ(povm_distance(x, y).max, 1.0);
}

TEST(PovmDistance, two_binomial_models_by_direct_summation) {
  const PovmMatrix a = binomial_loss_povm(0.547, 7, 70);
  const PovmMatrix b = binomial_loss_povm(0.5, 7, 70);
  double expected = 0.0;
  for (std::size_t n = 0; n < 7; ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k < 70; ++k) {
      double ta, tb;
      if (n < 6) {
        ta = binomial_by_product(k, n, 0.547);
        tb = binomial_by_product(k, n, 0.5);
      } else {
        ta = tb = 1.0;
        for (std::size_t j = 0; j < 6; ++j) {
          ta -= binomial_by_product(k, j, 0.547);
          tb -= binomial_by_product(k, j, 0.5);
        }
      }
      s += std::abs(ta - tb);
    }
    expected = std::max(expected, 0.5 * s);
  }
  EXPECT_NEAR(povm_distance(a, b).max, expected, 1e-12);
}

TEST(PovmIo, json_round_trip_preserves_entries) {
  const PovmMatrix a = binomial_loss_povm(0.547, 7, 70);
  const PovmMatrix b = povm_from_json(Json::parse(povm_to_json(a).dump()));
  EXPECT_EQ(a.entries(), b.entries());
  EXPECT_EQ(a.overflow_outcome(), b.overflow_outcome());
}

TEST(PovmIo, statistics_round_trip) {
  const std::vector<double> probes{0.5, 2.0};
  const ProbeMatrix F(make_probes(probes), 30);
  const StatisticsMatrix P = detection_probabilities(binomial_loss_povm(0.6, 4, 30), F);
  const LoadedStatistics loaded = statistics_from_json(Json::parse(statistics_to_json(P, probes, 30).dump()));
  EXPECT_EQ(loaded.stats.entries(), P.entries());
  EXPECT_EQ(loaded.probes, probes);
  EXPECT_EQ(loaded.truncation, 30u);
}
