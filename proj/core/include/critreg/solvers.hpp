// Routes to (phi-)critical points of Tikhonov functionals.
//
//  * rel_subgradient_descent: x_{n+1} = x_n - eta_n g_n with g_n a clipped
//    relative subgradient. For any probe u and N steps it guarantees
//        min_n F(x_n) <= F(u) + phi(u)
//                        + (||x_0 - u||^2 + C^2 sum eta^2) / (2 sum eta).
//  * nesterov: accelerated gradient with function-value restart.
//  * newton: damped Newton on the critical-point equation z(x) = 0.
#pragma once

#include "critreg/tikhonov.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace critreg {

enum class Termination { Tolerance, MaxIter, StallDetected };

std::string to_string(Termination t);

struct SolveReport {
  Vector final_x;
  Vector best_x;
  std::size_t iterations = 0;
  std::vector<Scalar> objective_history;
  Scalar grad_norm = 0.0;  // ||z|| at final_x
  bool sign_ok = true;     // <z, final_x> <= 0
  bool converged = false;
  Termination termination = Termination::MaxIter;
  std::size_t clip_activations = 0;
  std::size_t restarts = 0;

  Scalar best_value() const;
};

class StepSchedule {
 public:
  enum class Kind { Constant, DiminishingSqrt, SquareSummable };

  static StepSchedule constant(Scalar c) { return StepSchedule(Kind::Constant, c); }
  /// eta_n = c / sqrt(n)
  static StepSchedule diminishing_sqrt(Scalar c) { return StepSchedule(Kind::DiminishingSqrt, c); }
  /// eta_n = c / n: square-summable, not summable.
  static StepSchedule square_summable(Scalar c) { return StepSchedule(Kind::SquareSummable, c); }

  Kind kind() const { return kind_; }
  Scalar scale() const { return c_; }

  /// Step size for the n-th update, n >= 1.
  Scalar step(std::size_t n) const;

  /// (sum_{n<=N} eta_n, sum_{n<=N} eta_n^2).
  std::pair<Scalar, Scalar> sums(std::size_t steps) const;

 private:
  StepSchedule(Kind kind, Scalar c);
  Kind kind_;
  Scalar c_;
};

/// Value plus one relative-subgradient selection.
struct Objective {
  std::function<Scalar(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
};

Objective make_objective(const TikhonovProblem& problem);

/// Algorithm with g_n = lambda_n g*_n, lambda_n = min(1, clip / ||g*_n||).
/// Stops early when ||g*_n|| <= 1e-14 (1 + |F(x_n)|).
SolveReport rel_subgradient_descent(const Objective& objective, const Vector& x0,
                                    const StepSchedule& schedule, Scalar clip = 1e3,
                                    std::size_t max_iter = 1000);

/// Right-hand side of the descent guarantee for a run of `steps` updates.
Scalar descent_bound(Scalar value_plus_phi_at_u, const Vector& x0, const Vector& u,
                     const StepSchedule& schedule, Scalar clip, std::size_t steps);

struct NesterovOptions {
  std::size_t max_iter = 500;
  Scalar grad_tol = 1e-10;
};

/// Step 1/L with L = ||K^T K|| (power iteration) + alpha max|R''| at the
/// current iterate, refreshed on every restart. Momentum restarts whenever
/// the objective increases by more than its rounding noise, and an uphill
/// plain gradient step doubles L. Below the noise level the restart test is
/// <grad(y), x_next - x> > 0, which keeps the step and leaves L alone.
SolveReport nesterov(const TikhonovProblem& problem, const Vector& x0,
                     const NesterovOptions& options = {});

struct NewtonOptions {
  std::size_t max_iter = 50;
  Scalar grad_tol = 1e-10;
  Index dense_cap = 4096;
  int max_backtracks = 30;
};

/// Solves (K^T K + alpha diag(R''(x))) d = -z and takes x + s d with
/// s in {1, 1/2, ...}. A step is accepted when the simplified Newton
/// correction J(x)^{-1} z(x + s d) is shorter than d. Factorization failure
/// triggers one retry with J + mu I, mu = 1e-8 |trace J| / n.
SolveReport newton(const TikhonovProblem& problem, const Vector& x0,
                   const NewtonOptions& options = {});

struct InexactCheck {
  bool norm_ok = false;
  bool sign_ok = false;
  Scalar ratio = 0.0;  // ||z|| / alpha
};

InexactCheck check_inexact(const TikhonovProblem& problem, const Vector& x, Scalar ratio_tol);

}  // namespace critreg
