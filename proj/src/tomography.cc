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

#include "pnrtomo/tomography.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "pnrtomo/errors.h"

namespace pnrtomo {

std::string to_string(ObjectiveForm f) {
  return f == ObjectiveForm::kSquaredResidual ? "squared_residual" : "paper_norm";
}

std::string to_string(StepRule r) { return r == StepRule::kFixed ? "fixed" : "backtracking"; }

std::string to_string(SolverMethod m) {
  return m == SolverMethod::kInteriorPoint ? "interior_point" : "projected_gradient";
}

SolverMethod solver_method_from_string(const std::string &s) {
  if (s == "interior_point") return SolverMethod::kInteriorPoint;
  if (s == "projected_gradient") return SolverMethod::kProjectedGradient;
  throw ConfigError("method", "expected interior_point or projected_gradient, got '" + s + "'");
}

ObjectiveForm objective_form_from_string(const std::string &s) {
  if (s == "squared_residual") return ObjectiveForm::kSquaredResidual;
  if (s == "paper_norm") return ObjectiveForm::kPaperNorm;
  throw ConfigError("objective_form", "expected squared_residual or paper_norm, got '" + s + "'");
}

StepRule step_rule_from_string(const std::string &s) {
  if (s == "fixed") return StepRule::kFixed;
  if (s == "backtracking") return StepRule::kBacktracking;
  throw ConfigError("step_rule", "expected fixed or backtracking, got '" + s + "'");
}

void SolverOptions::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(relative_tolerance > 0.0)) throw std::invalid_argument("relative_tolerance must be > 0");
  if (!(absolute_tolerance >= 0.0)) throw std::invalid_argument("absolute_tolerance must be >= 0");
}

Json solver_options_to_json(const SolverOptions &o) {
  return Json{{"gamma", o.gamma},
              {"max_iterations", o.max_iterations},
              {"relative_tolerance", o.relative_tolerance},
              {"absolute_tolerance", o.absolute_tolerance},
              {"objective_form", to_string(o.objective_form)},
              {"step_rule", to_string(o.step_rule)},
              {"method", to_string(o.method)}};
}

SolverOptions solver_options_from_json(const Json &j, SolverOptions o) {
  if (!j.is_object()) throw ConfigError("solver", "expected an object");
  try {
    o.gamma = j.value("gamma", o.gamma);
    o.max_iterations = j.value("max_iterations", o.max_iterations);
    o.relative_tolerance = j.value("relative_tolerance", o.relative_tolerance);
    o.absolute_tolerance = j.value("absolute_tolerance", o.absolute_tolerance);
    if (j.contains("objective_form")) {
      o.objective_form = objective_form_from_string(j["objective_form"].get<std::string>());
    }
    if (j.contains("step_rule")) o.step_rule = step_rule_from_string(j["step_rule"].get<std::string>());
    if (j.contains("method")) o.method = solver_method_from_string(j["method"].get<std::string>());
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("solver", e.what());
  }
  try {
    o.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError("solver", e.what());
  }
  return o;
}

Json solver_report_to_json(const SolverReport &r) {
  Json j = solver_options_to_json(r.options);
  j["iterations_used"] = r.iterations_used;
  j["final_objective"] = r.final_objective;
  j["residual_term"] = r.residual_term;
  j["residual_norm"] = r.residual_norm;
  j["penalty_value"] = r.penalty_value;
  j["converged"] = r.converged;
  j["alternate_objective"] = r.alternate_objective;
  j["suboptimality_bound"] = r.suboptimality_bound;
  j["lipschitz_estimate"] = r.lipschitz_estimate;
  if (!r.objective_trace.empty()) j["objective_trace"] = r.objective_trace;
  return j;
}

SolverReport solver_report_from_json(const Json &j) {
  SolverReport r;
  r.options = solver_options_from_json(j);
  try {
    r.iterations_used = j.at("iterations_used").get<std::int64_t>();
    r.final_objective = j.at("final_objective").get<double>();
    r.residual_term = j.at("residual_term").get<double>();
    r.residual_norm = j.at("residual_norm").get<double>();
    r.penalty_value = j.at("penalty_value").get<double>();
    r.converged = j.at("converged").get<bool>();
    r.alternate_objective = j.at("alternate_objective").get<double>();
    r.suboptimality_bound = j.at("suboptimality_bound").get<double>();
    r.lipschitz_estimate = j.at("lipschitz_estimate").get<double>();
    if (j.contains("objective_trace")) r.objective_trace = j["objective_trace"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("solver_report", e.what());
  }
  return r;
}

double smoothing_penalty(const Matrix &theta, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("smoothing_penalty: gamma must be >= 0");
  double s = 0.0;
  for (Eigen::Index n = 0; n < theta.cols(); ++n) {
    for (Eigen::Index k = 0; k + 1 < theta.rows(); ++k) {
      const double d = theta(k, n) - theta(k + 1, n);
      s += d * d;
    }
  }
  return gamma * s;
}

double smoothing_penalty(const PovmMatrix &povm, double gamma) {
  return smoothing_penalty(povm.entries(), gamma);
}

namespace {

void check_shapes(const StatisticsMatrix &P, const ProbeMatrix &F, const Matrix &theta) {
  if (P.probes() != F.size()) {
    throw ShapeError("statistics have " + std::to_string(P.probes()) + " rows but there are " +
                     std::to_string(F.size()) + " probes");
  }
  if (static_cast<std::size_t>(theta.rows()) != F.truncation()) {
    throw ShapeError("POVM truncation does not match the probe matrix");
  }
  if (static_cast<std::size_t>(theta.cols()) != P.outcomes()) {
    throw ShapeError("POVM outcome count does not match the statistics");
  }
}

double data_term(double residual_sq, ObjectiveForm form) {
  return form == ObjectiveForm::kSquaredResidual ? residual_sq
                                                 : std::sqrt(residual_sq + kPaperNormEpsilon);
}

struct Evaluation {
  double residual_sq = 0.0;
  double penalty = 0.0;
  double value = 0.0;
};

// Objective with its first and second derivatives. The Hessian is
//   I_N (x) (data_scale * F^T F + 2 gamma D^T D) - rank_one * vec(G) vec(G)^T
// with G = F^T (F theta - P); rank_one is zero for the squared form.
class SmoothObjective {
 public:
  SmoothObjective(const Matrix &P, const Matrix &F, double gamma, ObjectiveForm form)
      : P_(P), F_(F), gram_(F.transpose() * F), gamma_(gamma), form_(form) {}

  Evaluation evaluate(const Matrix &theta) const {
    Evaluation e;
    residual_ = F_ * theta - P_;
    e.residual_sq = residual_.squaredNorm();
    e.penalty = smoothing_penalty(theta, gamma_);
    e.value = data_term(e.residual_sq, form_) + e.penalty;
    return e;
  }

  double data_scale(const Evaluation &e) const {
    return form_ == ObjectiveForm::kSquaredResidual
               ? 2.0
               : 1.0 / std::sqrt(e.residual_sq + kPaperNormEpsilon);
  }

  double rank_one_coefficient(const Evaluation &e) const {
    if (form_ == ObjectiveForm::kSquaredResidual) return 0.0;
    const double s = std::sqrt(e.residual_sq + kPaperNormEpsilon);
    return 1.0 / (s * s * s);
  }

  // F^T (F theta - P) at the point most recently passed to evaluate().
  Matrix residual_gradient() const { return F_.transpose() * residual_; }

  // Gradient at the point most recently passed to evaluate().
  void gradient(const Matrix &theta, const Evaluation &e, Matrix &grad) const {
    grad.noalias() = data_scale(e) * (F_.transpose() * residual_);
    if (gamma_ > 0.0) {
      const Eigen::Index M = theta.rows();
      const double g2 = 2.0 * gamma_;
      for (Eigen::Index k = 0; k < M; ++k) {
        for (Eigen::Index n = 0; n < theta.cols(); ++n) {
          double lap = 0.0;
          if (k > 0) lap += theta(k, n) - theta(k - 1, n);
          if (k + 1 < M) lap += theta(k, n) - theta(k + 1, n);
          grad(k, n) += g2 * lap;
        }
      }
    }
  }

  // The M x M block shared by every outcome column.
  Matrix column_hessian(const Evaluation &e) const {
    Matrix h = data_scale(e) * gram_;
    const Eigen::Index M = h.rows();
    for (Eigen::Index k = 0; k + 1 < M; ++k) {
      h(k, k) += 2.0 * gamma_;
      h(k + 1, k + 1) += 2.0 * gamma_;
      h(k, k + 1) -= 2.0 * gamma_;
      h(k + 1, k) -= 2.0 * gamma_;
    }
    return h;
  }

  const Matrix &gram() const { return gram_; }

 private:
  const Matrix &P_;
  const Matrix &F_;
  Matrix gram_;
  double gamma_;
  ObjectiveForm form_;
  mutable Matrix residual_;
};

struct DescentResult {
  std::int64_t iterations = 0;
  bool converged = false;
};

// Monotone accelerated projected gradient from a feasible `theta`, which on
// return holds the best point found. The gradient step is taken from a
// momentum point; momentum resets whenever a step fails to improve on the
// best objective, so accepted objective values never increase.
DescentResult accelerated_descent(const SmoothObjective &problem, Matrix &theta, double lipschitz,
                                  const SolverOptions &options, std::vector<double> *trace) {
  const Eigen::Index M = theta.rows(), N = theta.cols();
  const double base_step = 1.0 / lipschitz;
  Evaluation current = problem.evaluate(theta);
  if (trace) trace->push_back(current.value);
  Matrix grad(M, N), candidate(M, N), extrapolated = theta, previous = theta;
  double momentum = 1.0;
  double step = base_step;
  DescentResult result;
  std::int64_t it = 0;
  for (; it < options.max_iterations; ++it) {
    const Evaluation at_y = problem.evaluate(extrapolated);
    problem.gradient(extrapolated, at_y, grad);

    Evaluation next;
    if (options.step_rule == StepRule::kFixed) {
      candidate = extrapolated - base_step * grad;
      project_rows_to_simplex(candidate);
      next = problem.evaluate(candidate);
    } else {
      // Try twice the last accepted step, then halve until the quadratic
      // upper model holds.
      step = std::min(2.0 * step, 1e6 * base_step);
      bool accepted = false;
      for (int halvings = 0; halvings < 80; ++halvings) {
        candidate = extrapolated - step * grad;
        project_rows_to_simplex(candidate);
        next = problem.evaluate(candidate);
        const Matrix delta = candidate - extrapolated;
        const double model = at_y.value + (grad.array() * delta.array()).sum() +
                             delta.squaredNorm() / (2.0 * step);
        if (next.value <= model) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        result.converged = true;
        break;
      }
    }

    if (next.value <= current.value) {
      const double change = current.value - next.value;
      const double threshold = std::max(options.relative_tolerance * std::abs(current.value),
                                        options.absolute_tolerance);
      const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      previous.swap(theta);
      theta = candidate;
      current = next;
      if (trace) trace->push_back(current.value);
      extrapolated = theta + ((momentum - 1.0) / momentum_next) * (theta - previous);
      momentum = momentum_next;
      if (change <= threshold) {
        result.converged = true;
        ++it;
        break;
      }
    } else {
      if (momentum == 1.0) {
        // A plain projected step from the best point could not descend:
        // stationary to machine precision.
        result.converged = true;
        ++it;
        break;
      }
      momentum = 1.0;
      extrapolated = theta;
      previous = theta;
    }
  }
  result.iterations = it;
  return result;
}

// Solves the equality-constrained Newton system
//   [ I_N (x) B_n    E^T ] [dx]   [r]
//   [ E              0   ] [nu] = [0]
// where B_n = t * H + diag(1 / x_n^2) acts on column n and E sums each row.
// Column blocks are independent, so the system reduces to one M x M Schur
// complement S = sum_n B_n^{-1}.
class BarrierNewtonSystem {
 public:
  BarrierNewtonSystem(const Matrix &column_hessian, double t, const Matrix &x) {
    const Eigen::Index M = x.rows(), N = x.cols();
    inverses_.reserve(static_cast<std::size_t>(N));
    Matrix schur = Matrix::Zero(M, M);
    const Matrix identity = Matrix::Identity(M, M);
    for (Eigen::Index n = 0; n < N; ++n) {
      Matrix block = t * column_hessian;
      for (Eigen::Index k = 0; k < M; ++k) block(k, k) += 1.0 / (x(k, n) * x(k, n));
      Eigen::LLT<Matrix> llt(block);
      // At large t rounding can cost positive definiteness; retry with a
      // growing diagonal shift.
      const double scale = block.diagonal().cwiseAbs().maxCoeff();
      for (double shift = 1e-15; llt.info() != Eigen::Success; shift *= 100.0) {
        if (shift > 1e-6) {
          ok_ = false;
          return;
        }
        llt.compute(block + (shift * scale) * identity);
      }
      inverses_.push_back(llt.solve(identity));
      schur += inverses_.back();
    }
    schur_.compute(schur);
    ok_ = schur_.info() == Eigen::Success;
  }

  bool ok() const { return ok_; }

  Matrix solve(const Matrix &rhs) const {
    const Eigen::Index N = rhs.cols();
    Vector total = Vector::Zero(rhs.rows());
    for (Eigen::Index n = 0; n < N; ++n) total += inverses_[static_cast<std::size_t>(n)] * rhs.col(n);
    const Vector nu = schur_.solve(total);
    Matrix dx(rhs.rows(), N);
    for (Eigen::Index n = 0; n < N; ++n) {
      dx.col(n) = inverses_[static_cast<std::size_t>(n)] * (rhs.col(n) - nu);
    }
    return dx;
  }

 private:
  std::vector<Matrix> inverses_;
  Eigen::LDLT<Matrix> schur_;
  bool ok_ = true;
};

double frobenius_dot(const Matrix &a, const Matrix &b) { return (a.array() * b.array()).sum(); }

struct BarrierResult {
  std::int64_t iterations = 0;
  bool converged = false;
  double gap = 0.0;
};

// Log-barrier method: for increasing t, Newton-center
//   t * f(x) - sum log x   subject to row sums of x equal to one.
// After centering at t the objective is within (M N) / t of the optimum.
BarrierResult barrier_method(const SmoothObjective &problem, Matrix &x,
                             const SolverOptions &options, std::vector<double> *trace) {
  constexpr double kBarrierGrowth = 10.0;
  // On half the squared Newton decrement. In objective units the centering
  // error is this over t; rounding in t * grad - 1/x puts a floor near 1e-6.
  constexpr double kNewtonTolerance = 1e-7;
  constexpr double kStalledDecrement = 1e-3;
  constexpr double kArmijo = 0.01;
  constexpr int kMaxCentering = 200;

  const double m = static_cast<double>(x.size());
  Evaluation e = problem.evaluate(x);
  if (trace) trace->push_back(e.value);
  double t = m / std::max(e.value, 1e-6);
  BarrierResult result;
  Matrix grad(x.rows(), x.cols());

  auto barrier_value_change = [&](const Matrix &from, const Matrix &to, double f_from,
                                  double f_to) {
    return t * (f_to - f_from) - (to.array() / from.array()).log().sum();
  };

  while (result.iterations < options.max_iterations) {
    bool centered = false;
    for (int newton = 0; newton < kMaxCentering && result.iterations < options.max_iterations;
         ++newton) {
      problem.gradient(x, e, grad);
      const Matrix phi_grad = t * grad - x.cwiseInverse();
      const BarrierNewtonSystem system(problem.column_hessian(e), t, x);
      if (!system.ok()) break;
      Matrix dx = system.solve(-phi_grad);
      const double c = problem.rank_one_coefficient(e);
      if (c > 0.0) {
        // Sherman-Morrison for the -t c vec(G) vec(G)^T term.
        const Matrix u = std::sqrt(t * c) * problem.residual_gradient();
        const Matrix z = system.solve(u);
        const double denom = 1.0 - frobenius_dot(u, z);
        if (denom > 0.0) dx += z * (frobenius_dot(u, dx) / denom);
      }
      const double decrement_sq = -frobenius_dot(phi_grad, dx);
      if (!(decrement_sq >= 0.0) || 0.5 * decrement_sq <= kNewtonTolerance) {
        centered = true;
        break;
      }

      double step = 1.0;
      for (Eigen::Index i = 0; i < dx.size(); ++i) {
        if (dx.data()[i] < 0.0) step = std::min(step, -0.99 * x.data()[i] / dx.data()[i]);
      }
      Matrix candidate = x + step * dx;
      Evaluation ce = problem.evaluate(candidate);
      bool accepted = false;
      for (int halvings = 0; halvings < 60; ++halvings) {
        if (barrier_value_change(x, candidate, e.value, ce.value) <=
            -kArmijo * step * decrement_sq) {
          accepted = true;
          break;
        }
        step *= 0.5;
        candidate = x + step * dx;
        ce = problem.evaluate(candidate);
      }
      ++result.iterations;
      if (!accepted) {
        // Progress is below what double precision can resolve at this t.
        centered = true;
        problem.evaluate(x);
        break;
      }
      x.swap(candidate);
      e = ce;
      if (trace) trace->push_back(e.value);
      if (step < 1e-2 && decrement_sq < kStalledDecrement) {
        // Line search is fighting rounding noise near the center.
        centered = true;
        break;
      }
    }
    if (!centered) break;
    result.gap = m / t;
    if (result.gap <= std::max(options.relative_tolerance * std::abs(e.value),
                               options.absolute_tolerance)) {
      result.converged = true;
      break;
    }
    t *= kBarrierGrowth;
    // Keep the cached residual in sync with x for the next gradient.
    e = problem.evaluate(x);
  }
  return result;
}

bool all_finite(const Matrix &m) { return m.allFinite(); }

}  // namespace

double objective(const StatisticsMatrix &P, const ProbeMatrix &F, const Matrix &theta,
                 const SolverOptions &options) {
  check_shapes(P, F, theta);
  const double r2 = (P.entries() - F.entries() * theta).squaredNorm();
  return data_term(r2, options.objective_form) + smoothing_penalty(theta, options.gamma);
}

double objective(const StatisticsMatrix &P, const ProbeMatrix &F, const PovmMatrix &povm,
                 const SolverOptions &options) {
  return objective(P, F, povm.entries(), options);
}

std::vector<double> project_row_to_simplex(std::span<const double> row) {
  const std::size_t n = row.size();
  if (n == 0) return {};
  for (double v : row) {
    if (!std::isfinite(v)) throw std::invalid_argument("project_row_to_simplex: non-finite entry");
  }
  std::vector<double> u(row.begin(), row.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  // Largest j with u_j - (sum_{i<=j} u_i - 1) / j > 0 fixes the threshold.
  double cumulative = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(row[i] - tau, 0.0);
  return out;
}

void project_rows_to_simplex(Matrix &theta) {
  std::vector<double> row(static_cast<std::size_t>(theta.cols()));
  for (Eigen::Index k = 0; k < theta.rows(); ++k) {
    for (Eigen::Index n = 0; n < theta.cols(); ++n) row[static_cast<std::size_t>(n)] = theta(k, n);
    const auto p = project_row_to_simplex(row);
    for (Eigen::Index n = 0; n < theta.cols(); ++n) theta(k, n) = p[static_cast<std::size_t>(n)];
  }
}

double largest_eigenvalue_gram(const Matrix &F, int iterations) {
  if (F.size() == 0) return 0.0;
  const Matrix gram = F.transpose() * F;
  Vector v = Vector::Ones(gram.rows()) / std::sqrt(static_cast<double>(gram.rows()));
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-14 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

std::pair<PovmMatrix, SolverReport> reconstruct(const StatisticsMatrix &P, const ProbeMatrix &F,
                                                const SolverOptions &options) {
  options.validate();
  const Eigen::Index M = static_cast<Eigen::Index>(F.truncation());
  const Eigen::Index N = static_cast<Eigen::Index>(P.outcomes());
  if (N < 1) throw ShapeError("reconstruct: statistics have no outcomes");
  if (!all_finite(P.entries()) || !all_finite(F.entries())) {
    throw std::invalid_argument("reconstruct: non-finite input");
  }

  Matrix theta = Matrix::Constant(M, N, 1.0 / static_cast<double>(N));
  check_shapes(P, F, theta);

  SolverReport report;
  report.options = options;
  std::vector<double> *trace = options.record_trace ? &report.objective_trace : nullptr;
  const SmoothObjective problem(P.entries(), F.entries(), options.gamma, options.objective_form);

  if (N == 1) {
    // The only feasible point.
    report.converged = true;
  } else if (options.method == SolverMethod::kInteriorPoint) {
    const BarrierResult r = barrier_method(problem, theta, options, trace);
    report.iterations_used = r.iterations;
    report.converged = r.converged;
    report.suboptimality_bound = r.gap;
  } else {
    const double lambda = largest_eigenvalue_gram(F.entries());
    double lipschitz = 2.0 * lambda + 8.0 * options.gamma;
    if (options.objective_form == ObjectiveForm::kPaperNorm) {
      // Curvature of sqrt(r^2 + eps) grows as the residual shrinks; this only
      // seeds the line search.
      const double r0 = (F.entries() * theta - P.entries()).norm();
      lipschitz = lambda / std::max(r0, std::sqrt(kPaperNormEpsilon)) + 8.0 * options.gamma;
    }
    if (!(lipschitz > 0.0)) lipschitz = 1.0;
    report.lipschitz_estimate = lipschitz;
    const DescentResult r = accelerated_descent(problem, theta, lipschitz, options, trace);
    report.iterations_used = r.iterations;
    report.converged = r.converged;
  }

  // Interior iterates are strictly positive and projected-gradient iterates
  // already feasible; this pass removes rounding drift in the row sums.
  project_rows_to_simplex(theta);
  const double r2 = (F.entries() * theta - P.entries()).squaredNorm();
  report.residual_norm = std::sqrt(r2);
  report.residual_term = data_term(r2, options.objective_form);
  report.penalty_value = smoothing_penalty(theta, options.gamma);
  report.final_objective = report.residual_term + report.penalty_value;
  const ObjectiveForm other = options.objective_form == ObjectiveForm::kPaperNorm
                                  ? ObjectiveForm::kSquaredResidual
                                  : ObjectiveForm::kPaperNorm;
  report.alternate_objective = data_term(r2, other) + report.penalty_value;
  return {PovmMatrix(std::move(theta), true), std::move(report)};
}

}  // namespace pnrtomo
