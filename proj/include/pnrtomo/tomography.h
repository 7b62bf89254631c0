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

// Detector tomography: recover the POVM Pi from probe statistics P and the
// probe matrix F by minimizing
//
//     R(P - F Pi) + gamma * sum_{k,n} (theta_k^(n) - theta_{k+1}^(n))^2
//
// over the product of per-row probability simplexes, where R is either the
// Frobenius norm (smoothed at zero) or its square.
//
// Two minimizers are provided. The interior-point method runs Newton steps on
// a log-barrier and exploits the structure of the Hessian, which acts as the
// same M x M matrix on every outcome column (plus a rank-one term for the
// unsquared norm). Accelerated projected gradient with per-row simplex
// projection is cheaper per step but needs many iterations on the badly
// conditioned instances typical of coherent-state probes.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pnrtomo/povm.h"
#include "pnrtomo/povm_io.h"

namespace pnrtomo {

enum class ObjectiveForm {
  kSquaredResidual,  // ||P - F Pi||_F^2 + g(Pi)
  kPaperNorm,        // sqrt(||P - F Pi||_F^2 + eps) + g(Pi)
};

enum class StepRule { kFixed, kBacktracking };

enum class SolverMethod { kInteriorPoint, kProjectedGradient };

std::string to_string(ObjectiveForm f);
std::string to_string(StepRule r);
std::string to_string(SolverMethod m);
ObjectiveForm objective_form_from_string(const std::string &s);
StepRule step_rule_from_string(const std::string &s);
SolverMethod solver_method_from_string(const std::string &s);

struct SolverOptions {
  double gamma = 0.01;
  std::int64_t max_iterations = 50000;
  /// Projected gradient: stop when the objective changes by less than this
  /// fraction. Interior point: stop when the certified suboptimality bound
  /// falls below this fraction of the objective.
  double relative_tolerance = 1e-9;
  /// Absolute floor for both tests above, for optima with objective ~0.
  double absolute_tolerance = 1e-12;
  ObjectiveForm objective_form = ObjectiveForm::kPaperNorm;
  StepRule step_rule = StepRule::kBacktracking;
  SolverMethod method = SolverMethod::kInteriorPoint;
  /// Keep the objective value of every iterate in SolverReport::objective_trace.
  bool record_trace = false;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Smoothing of sqrt(r^2 + eps) used by ObjectiveForm::kPaperNorm.
inline constexpr double kPaperNormEpsilon = 1e-12;

struct SolverReport {
  std::int64_t iterations_used = 0;
  double final_objective = 0.0;
  double residual_term = 0.0;   // data term as it enters the objective
  double residual_norm = 0.0;   // ||P - F Pi||_F
  double penalty_value = 0.0;   // g(Pi)
  bool converged = false;
  /// Value of the other objective form at the returned point. The two forms
  /// have different minimizers when gamma > 0.
  double alternate_objective = 0.0;
  /// Interior point only: certified bound on final_objective - optimum.
  double suboptimality_bound = 0.0;
  double lipschitz_estimate = 0.0;
  SolverOptions options;
  std::vector<double> objective_trace;
};

Json solver_report_to_json(const SolverReport &report);
SolverReport solver_report_from_json(const Json &j);
SolverOptions solver_options_from_json(const Json &j, SolverOptions defaults = {});
Json solver_options_to_json(const SolverOptions &o);

/// gamma * sum over columns of squared differences of adjacent rows.
double smoothing_penalty(const Matrix &theta, double gamma);
double smoothing_penalty(const PovmMatrix &povm, double gamma);

/// Value of the chosen objective. Throws ShapeError on mismatch.
double objective(const StatisticsMatrix &P, const ProbeMatrix &F, const Matrix &theta,
                 const SolverOptions &options);
double objective(const StatisticsMatrix &P, const ProbeMatrix &F, const PovmMatrix &povm,
                 const SolverOptions &options);

/// Euclidean projection onto {x : x >= 0, sum x = 1}.
std::vector<double> project_row_to_simplex(std::span<const double> row);

/// Projects every row of `theta` in place.
void project_rows_to_simplex(Matrix &theta);

/// Largest eigenvalue of F^T F by power iteration from a fixed start vector.
double largest_eigenvalue_gram(const Matrix &F, int iterations = 500);

/// Minimizes the objective starting from the row-uniform POVM. The returned
/// POVM is feasible whether or not the run converged. Throws ShapeError on
/// dimension mismatch and std::invalid_argument on non-finite input.
std::pair<PovmMatrix, SolverReport> reconstruct(const StatisticsMatrix &P, const ProbeMatrix &F,
                                                const SolverOptions &options = {});

}  // namespace pnrtomo
