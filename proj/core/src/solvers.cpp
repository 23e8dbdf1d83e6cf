#include "critreg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace critreg {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Tolerance:
      return "tolerance";
    case Termination::MaxIter:
      return "max-iter";
    case Termination::StallDetected:
      return "stall";
  }
  return "unknown";
}

Scalar SolveReport::best_value() const {
  return *std::min_element(objective_history.begin(), objective_history.end());
}

// ---- step schedules -------------------------------------------------------

StepSchedule::StepSchedule(Kind kind, Scalar c) : kind_(kind), c_(c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("step schedule: scale must be > 0");
}

Scalar StepSchedule::step(std::size_t n) const {
  if (n == 0) throw InvalidArgument("step schedule: steps are numbered from 1");
  const auto dn = static_cast<Scalar>(n);
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::DiminishingSqrt:
      return c_ / std::sqrt(dn);
    case Kind::SquareSummable:
      return c_ / dn;
  }
  return c_;
}

std::pair<Scalar, Scalar> StepSchedule::sums(std::size_t steps) const {
  Scalar s1 = 0.0;
  Scalar s2 = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const Scalar eta = step(n);
    s1 += eta;
    s2 += eta * eta;
  }
  return {s1, s2};
}

// ---- relative subgradient descent -----------------------------------------

Objective make_objective(const TikhonovProblem& problem) {
  return Objective{
      [&problem](const Vector& x) { return problem.value(x); },
      [&problem](const Vector& x) { return problem.gradient(x); },
  };
}

namespace {

Scalar checked_value(const std::function<Scalar(const Vector&)>& f, const Vector& x,
                     std::size_t iterate, const char* solver) {
  const Scalar v = f(x);
  if (!std::isfinite(v)) {
    throw DivergenceError(std::string(solver) + ": non-finite objective", iterate);
  }
  return v;
}

void record(SolveReport& report, const Vector& x, Scalar value) {
  if (report.objective_history.empty() || value < report.best_value()) report.best_x = x;
  report.objective_history.push_back(value);
}

}  // namespace

SolveReport rel_subgradient_descent(const Objective& objective, const Vector& x0,
                                    const StepSchedule& schedule, Scalar clip,
                                    std::size_t max_iter) {
  if (max_iter < 1) throw InvalidArgument("subgradient descent: max_iter must be >= 1");
  if (!(clip > 0.0)) throw InvalidArgument("subgradient descent: clip must be > 0");
  require_finite(x0, "subgradient descent start");

  SolveReport report;
  Vector x = x0;
  Scalar fx = checked_value(objective.value, x, 0, "subgradient descent");
  record(report, x, fx);
  Vector g = objective.subgradient(x);
  report.termination = Termination::MaxIter;

  for (std::size_t n = 1; n <= max_iter; ++n) {
    const Scalar gnorm = g.norm();
    if (gnorm <= 1e-14 * (1.0 + std::abs(fx))) {
      report.termination = Termination::Tolerance;
      break;
    }
    Scalar lambda = 1.0;
    if (gnorm > clip) {
      lambda = clip / gnorm;
      ++report.clip_activations;
    }
    x -= schedule.step(n) * lambda * g;
    fx = checked_value(objective.value, x, n, "subgradient descent");
    record(report, x, fx);
    g = objective.subgradient(x);
    report.iterations = n;
  }

  report.final_x = x;
  report.grad_norm = g.norm();
  report.sign_ok = g.dot(x) <= 0.0;
  report.converged = report.termination == Termination::Tolerance;
  return report;
}

Scalar descent_bound(Scalar value_plus_phi_at_u, const Vector& x0, const Vector& u,
                     const StepSchedule& schedule, Scalar clip, std::size_t steps) {
  if (steps == 0) return std::numeric_limits<Scalar>::infinity();
  const auto [s1, s2] = schedule.sums(steps);
  return value_plus_phi_at_u + ((x0 - u).squaredNorm() + clip * clip * s2) / (2.0 * s1);
}

// ---- Nesterov -------------------------------------------------------------

namespace {

Scalar curvature_bound(const TikhonovProblem& problem, const Vector& x) {
  const auto curv = problem.regularizer().diag_curvature(x);
  if (!curv) {
    throw UnsupportedOperation("nesterov: regularizer '" + problem.regularizer().name() +
                               "' provides no curvature estimate");
  }
  return curv->cwiseAbs().maxCoeff();
}

void finish(SolveReport& report, const TikhonovProblem& problem, const Vector& x) {
  const Vector z = problem.gradient(x);
  report.final_x = x;
  report.grad_norm = z.norm();
  report.sign_ok = z.dot(x) <= 0.0;
}

}  // namespace

SolveReport nesterov(const TikhonovProblem& problem, const Vector& x0,
                     const NesterovOptions& options) {
  require_length(x0, problem.dim(), "nesterov start");
  require_finite(x0, "nesterov start");

  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar gram_norm = estimate_normal_norm(problem.op());
  auto lipschitz = [&](const Vector& at) {
    return gram_norm + problem.alpha() * curvature_bound(problem, at);
  };

  SolveReport report;
  Vector x = x0;
  Scalar fx = checked_value([&](const Vector& v) { return problem.value(v); }, x, 0, "nesterov");
  record(report, x, fx);

  Scalar L = lipschitz(x);
  Vector y = x;
  Scalar t = 1.0;
  report.termination = Termination::MaxIter;

  for (std::size_t k = 1; k <= options.max_iter; ++k) {
    if (problem.gradient(x).norm() <= options.grad_tol) {
      report.termination = Termination::Tolerance;
      break;
    }
    const Vector gy = problem.gradient(y);
    const Vector x_next = y - gy / L;
    const Scalar f_next =
        checked_value([&](const Vector& v) { return problem.value(v); }, x_next, k, "nesterov");

    // Value changes below this are rounding noise and carry no information.
    const Scalar noise = 8.0 * eps * (std::abs(fx) + std::abs(f_next));
    if (f_next > fx + noise) {
      // Restart from x with fresh curvature; if even the momentum-free step
      // went uphill the estimate was too small.
      ++report.restarts;
      const Scalar refreshed = lipschitz(x);
      L = (t == 1.0) ? std::max(refreshed, 2.0 * L) : refreshed;
      y = x;
      t = 1.0;
      report.iterations = k;
      continue;
    }
    if (t > 1.0 && gy.dot(x_next - x) > 0.0) {
      // Momentum points uphill: keep the step, drop the momentum.
      ++report.restarts;
      y = x_next;
      x = x_next;
      fx = f_next;
      t = 1.0;
      record(report, x, fx);
      report.iterations = k;
      continue;
    }
    const Scalar t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + ((t - 1.0) / t_next) * (x_next - x);
    x = x_next;
    fx = f_next;
    t = t_next;
    record(report, x, fx);
    report.iterations = k;
  }

  finish(report, problem, x);
  if (report.termination != Termination::Tolerance && report.grad_norm <= options.grad_tol) {
    report.termination = Termination::Tolerance;
  }
  report.converged = report.termination == Termination::Tolerance;
  return report;
}

// ---- Newton ---------------------------------------------------------------

namespace {

bool factorization_ok(const Eigen::PartialPivLU<Matrix>& lu) {
  const auto diag = lu.matrixLU().diagonal();
  return diag.allFinite() && (diag.array() != 0.0).all();
}

}  // namespace

SolveReport newton(const TikhonovProblem& problem, const Vector& x0,
                   const NewtonOptions& options) {
  require_length(x0, problem.dim(), "newton start");
  require_finite(x0, "newton start");
  if (problem.discrepancy().exponent() != 2.0) {
    throw UnsupportedOperation("newton: only the quadratic discrepancy (p = 2) is supported");
  }
  const Index n = problem.dim();
  if (n > options.dense_cap) {
    throw UnsupportedOperation("newton: dimension " + std::to_string(n) +
                               " exceeds the dense cap " + std::to_string(options.dense_cap));
  }
  const Matrix gram = problem.op().gram();
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  auto value_of = [&](const Vector& v) { return problem.value(v); };

  SolveReport report;
  Vector x = x0;
  record(report, x, checked_value(value_of, x, 0, "newton"));
  Vector z = problem.gradient(x);
  report.termination = Termination::MaxIter;

  for (std::size_t k = 1; k <= options.max_iter; ++k) {
    if (z.norm() <= options.grad_tol) {
      report.termination = Termination::Tolerance;
      break;
    }
    const auto curv = problem.regularizer().diag_curvature(x);
    if (!curv) {
      throw UnsupportedOperation("newton: regularizer '" + problem.regularizer().name() +
                                 "' provides no curvature");
    }
    Matrix jac = gram;
    jac.diagonal() += problem.alpha() * *curv;

    Eigen::PartialPivLU<Matrix> lu(jac);
    Vector d;
    if (factorization_ok(lu)) d = -lu.solve(z);
    if (!factorization_ok(lu) || !d.allFinite()) {
      Scalar mu = 1e-8 * std::abs(jac.trace()) / static_cast<Scalar>(n);
      if (mu == 0.0) mu = 1e-8;
      jac.diagonal().array() += mu;
      lu.compute(jac);
      if (factorization_ok(lu)) d = -lu.solve(z);
      if (!factorization_ok(lu) || !d.allFinite()) {
        throw SingularSystemError("newton: Jacobian singular after diagonal shift (iterate " +
                                  std::to_string(k) + ")");
      }
    }

    if (d.cwiseAbs().maxCoeff() <= 4.0 * eps * std::max<Scalar>(1.0, x.cwiseAbs().maxCoeff())) {
      report.termination = Termination::StallDetected;
      break;
    }

    const Scalar d_norm = d.norm();
    Scalar s = 1.0;
    bool accepted = false;
    Vector x_trial;
    Vector z_trial;
    for (int b = 0; b <= options.max_backtracks; ++b, s *= 0.5) {
      x_trial = x + s * d;
      z_trial = problem.gradient(x_trial);
      if (!z_trial.allFinite()) continue;
      if (lu.solve(z_trial).norm() < d_norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      report.termination = Termination::StallDetected;
      break;
    }
    x = std::move(x_trial);
    z = std::move(z_trial);
    record(report, x, checked_value(value_of, x, k, "newton"));
    report.iterations = k;
  }

  report.final_x = x;
  report.grad_norm = z.norm();
  report.sign_ok = z.dot(x) <= 0.0;
  if (report.termination == Termination::MaxIter && report.grad_norm <= options.grad_tol) {
    report.termination = Termination::Tolerance;
  }
  report.converged = report.grad_norm <= options.grad_tol;
  if (report.converged) report.termination = Termination::Tolerance;
  return report;
}

// ---- inexactness ----------------------------------------------------------

InexactCheck check_inexact(const TikhonovProblem& problem, const Vector& x, Scalar ratio_tol) {
  const Vector z = problem.gradient(x);
  InexactCheck out;
  out.ratio = z.norm() / problem.alpha();
  out.norm_ok = out.ratio <= ratio_tol;
  out.sign_ok = z.dot(x) <= 0.0;
  return out;
}

}  // namespace critreg
