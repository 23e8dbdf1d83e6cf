#include "critreg/audits.hpp"

#include "critreg/analysis.hpp"
#include "critreg/discrepancy.hpp"
#include "critreg/experiments.hpp"
#include "critreg/network.hpp"
#include "critreg/random.hpp"
#include "critreg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace critreg {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

Vector central_difference(const std::function<Scalar(const Vector&)>& f, const Vector& x,
                          Scalar h = 1e-5) {
  Vector g(x.size());
  Vector xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar xi = x(i);
    xp(i) = xi + h;
    const Scalar fp = f(xp);
    xp(i) = xi - h;
    const Scalar fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Scalar relative_error(const Vector& approx, const Vector& exact) {
  return (approx - exact).norm() / std::max<Scalar>(exact.norm(), 1e-8);
}

Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

}  // namespace

AuditResult audit_adjoints(std::uint64_t seed) {
  Rng rng(seed);
  const Index n = 17;
  Vector d = rng.normal_vector(n);
  d(3) = 0.0;
  const std::vector<LinearOperator> ops{
      LinearOperator::diagonal(d), LinearOperator::mask(n, {0, 2, 5, 9, 16}),
      LinearOperator::cumulative_sum(n), LinearOperator::dense(random_matrix(rng, 11, n))};
  Scalar worst = 0.0;
  for (const auto& op : ops) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = rng.normal_vector(op.domain_dim());
      const Vector y = rng.normal_vector(op.range_dim());
      const Scalar lhs = op.apply(x).dot(y);
      const Scalar rhs = x.dot(op.adjoint_apply(y));
      worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
  }
  return {"adjoints", worst <= 1e-12, fmt("max relative mismatch %.3e", worst)};
}

AuditResult audit_gradients(std::uint64_t seed, std::size_t points) {
  Rng rng(seed);
  const Index n = 8;
  Scalar worst = 0.0;
  std::size_t checked = 0;

  const NormDiscrepancy d2(LinearOperator::dense(random_matrix(rng, 6, n)), 2.0);
  const NormDiscrepancy d15(LinearOperator::dense(random_matrix(rng, 6, n)), 1.5);
  const SeparableQuartic quartic;
  const DoubleWell well(0.75, rng.uniform_vector(n, 0.5, 2.0));
  const NetworkRegularizer netreg(QuasiHomNetwork::random({n, 16, 16, 4}, seed + 1));

  for (std::size_t p = 0; p < points; ++p) {
    const Vector x = rng.uniform_vector(n, -3.0, 3.0);
    const Vector y = rng.normal_vector(6);
    for (const NormDiscrepancy* d : {&d2, &d15}) {
      const Vector fd = central_difference([&](const Vector& v) { return d->value(v, y); }, x);
      worst = std::max(worst, relative_error(fd, d->gradient(x, y)));
    }
    const Vector fq = central_difference([&](const Vector& v) { return quartic.value(v); }, x);
    worst = std::max(worst, relative_error(fq, quartic.rel_subgradient(x)));
    checked += 3;

    bool off_kink = true;
    for (Index i = 0; i < n; ++i) {
      off_kink = off_kink && std::abs(x(i) - well.q() * well.weights()(i)) > 1e-3;
    }
    if (off_kink) {
      const Vector fw = central_difference([&](const Vector& v) { return well.value(v); }, x);
      worst = std::max(worst, relative_error(fw, well.rel_subgradient(x)));
      ++checked;
    }

    // Off a breakpoint the activation pattern is constant on the stencil.
    const Matrix lin = netreg.network().quasi_derivative_matrix(x);
    bool stable = true;
    for (Index i = 0; i < n && stable; ++i) {
      for (Scalar s : {-1e-5, 1e-5}) {
        Vector xs = x;
        xs(i) += s;
        stable = stable && netreg.network().quasi_derivative_matrix(xs) == lin;
      }
    }
    if (stable) {
      const Vector fn = central_difference([&](const Vector& v) { return netreg.value(v); }, x);
      worst = std::max(worst, relative_error(fn, netreg.rel_subgradient(x)));
      ++checked;
    }
  }
  return {"gradients", worst <= 1e-6,
          fmt("max relative error %.3e over %.0f checks", worst, static_cast<double>(checked))};
}

AuditResult audit_relative_subgradient(std::uint64_t seed, std::size_t pairs) {
  Rng rng(seed);
  const SeparableQuartic quartic;
  Scalar worst = INFINITY;
  for (std::size_t p = 0; p < pairs; ++p) {
    const Vector x = rng.uniform_vector(8, -5.0, 5.0);
    const Vector u = rng.uniform_vector(8, -5.0, 5.0);
    const Scalar slack = quartic.value(u) + quartic.phi_bound(u) - quartic.value(x) -
                        quartic.rel_subgradient(x).dot(u - x);
    worst = std::min(worst, slack / (1.0 + std::abs(quartic.value(u))));
  }
  return {"relative-subgradient", worst >= -1e-9, fmt("min relative slack %.3e", worst)};
}

AuditResult audit_descent_bound(std::uint64_t seed, std::size_t steps, std::size_t probes) {
  Rng rng(seed);
  const Index n = 8;
  const Scalar alpha = 0.1;
  auto quartic = std::make_shared<const SeparableQuartic>();
  const TikhonovProblem problem(NormDiscrepancy(LinearOperator::dense(random_matrix(rng, n, n))),
                                quartic, alpha, rng.normal_vector(n));
  const Objective objective = make_objective(problem);
  const Scalar clip = 1e3;
  const Vector x0 = rng.uniform_vector(n, -2.0, 2.0);

  Scalar worst = INFINITY;
  std::size_t clipped = 0;
  for (const StepSchedule& schedule :
       {StepSchedule::constant(1e-3), StepSchedule::diminishing_sqrt(1e-2),
        StepSchedule::square_summable(1e-2)}) {
    const SolveReport run = rel_subgradient_descent(objective, x0, schedule, clip, steps);
    clipped += run.clip_activations;
    const std::size_t taken = run.objective_history.size() - 1;
    for (std::size_t p = 0; p < probes; ++p) {
      const Vector u = rng.uniform_vector(n, -3.0, 3.0);
      // phi of T is alpha times the bound of the regularizer.
      const Scalar rhs = descent_bound(problem.value(u) + alpha * quartic->phi_bound(u), x0, u,
                                       schedule, clip, taken);
      worst = std::min(worst, (rhs - run.best_value()) / (1.0 + std::abs(rhs)));
    }
  }
  return {"descent-bound", worst >= -1e-9,
          fmt("min relative slack %.3e, clip activations %.0f", worst,
              static_cast<double>(clipped))};
}

AuditResult audit_double_well(std::uint64_t seed) {
  Rng rng(seed);
  const Index n = 32;
  const Scalar alpha = 0.5;
  Vector k(n);
  std::vector<KernelChoice> choice;
  for (Index i = 0; i < n; ++i) {
    k(i) = rng.bernoulli(0.25) ? 0.0 : rng.uniform(0.2, 2.0);
    choice.push_back(rng.bernoulli(0.5) ? KernelChoice::Well : KernelChoice::Zero);
  }
  const Vector y = rng.uniform_vector(n, -1.0, 4.0);
  auto well = std::make_shared<const DoubleWell>(0.75, rng.uniform_vector(n, 0.5, 2.0));
  const Vector x = doublewell_closed_form(k, y, alpha, *well, choice);

  Scalar residual = 0.0;
  const Vector res = doublewell_residual(k, y, alpha, *well, x);
  for (Index i = 0; i < n; ++i) {
    if (k(i) != 0.0) residual = std::max(residual, std::abs(res(i)));
  }

  // Newton started on the same side of every kink.
  Vector x0 = x;
  for (Index i = 0; i < n; ++i) {
    const Scalar kink = well->q() * well->weights()(i);
    const Scalar shifted = x(i) + 0.05 * rng.uniform(-1.0, 1.0);
    if ((shifted <= kink) == (x(i) <= kink)) x0(i) = shifted;
  }
  const TikhonovProblem problem(NormDiscrepancy(LinearOperator::diagonal(k)), well, alpha, y);
  NewtonOptions opts;
  opts.grad_tol = 1e-13;
  const SolveReport run = newton(problem, x0, opts);
  const Scalar diff = (run.final_x - x).cwiseAbs().maxCoeff();
  return {"double-well", residual <= 1e-12 && diff <= 1e-8,
          fmt("residual %.3e, newton deviation %.3e", residual, diff)};
}

AuditResult audit_hull() {
  const Vector k = (Vector(4) << 0.0, 1.0, 0.0, 2.0).finished();
  const Vector y = (Vector(4) << 1.0, 3.0, -2.0, 0.1).finished();
  const Vector w = Vector::Ones(4);
  const HullSolution strict = hull_critical_point(k, y, 1.0, DoubleWellHull(0.75, w));
  const HullSolution flat = hull_critical_point(k, y, 1.0, DoubleWellHull(0.5, w));
  const Vector well_choice = doublewell_closed_form(
      k, y, 1.0, DoubleWell(0.75, w), std::vector<KernelChoice>(4, KernelChoice::Well));
  const bool pass = strict.x(0) == 0.0 && strict.x(2) == 0.0 && !strict.multiplicity[0] &&
                    well_choice(0) == w(0) && flat.multiplicity[0] && flat.multiplicity[2] &&
                    !flat.multiplicity[1] && std::abs(strict.x(1) - well_choice(1)) <= 1e-15;
  return {"hull", pass, pass ? "kernel components forced to 0; q = 1/2 flagged" : "mismatch"};
}

AuditResult audit_ellipsoid(std::uint64_t seed) {
  Rng rng(seed);
  const Index n = 6;
  const Scalar alpha = 0.3;
  const LinearOperator op = LinearOperator::dense(random_matrix(rng, n, n));
  const Vector y = rng.normal_vector(n);
  const auto e = EllipsoidCharacterization::build(op, y, alpha, 0.7);
  const TikhonovProblem problem(NormDiscrepancy(op), std::make_shared<const SquaredNormReg>(),
                                alpha, y);
  const Scalar base = problem.value(e.center());
  Scalar worst = 0.0;
  int agree = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const Vector x0 = rng.uniform(0.01, 2.0) * rng.normal_vector(n).normalized();
    const Scalar increase = problem.value(e.center() + x0) - base;
    worst = std::max(worst, std::abs(increase - e.form(x0)) / (1.0 + std::abs(base)));
    agree += e.contains(x0) == (increase <= e.budget() + 1e-12 * (1.0 + std::abs(base)));
  }
  const auto unit = EllipsoidCharacterization::build(LinearOperator::identity(1),
                                                     Vector::Constant(1, 2.0), 1.0, 0.0);
  const bool pass = worst <= 1e-10 && agree == trials && std::abs(unit.center()(0) - 1.0) <= 1e-15;
  return {"ellipsoid", pass, fmt("identity mismatch %.3e, agreement %.0f%%", worst,
                                 100.0 * agree / trials)};
}

AuditResult audit_quasi_homogeneity(std::uint64_t seed) {
  Rng rng(seed);
  Scalar worst_ratio = 0.0;
  Scalar zero_bias = 0.0;
  for (int net_id = 0; net_id < 3; ++net_id) {
    const QuasiHomNetwork net = QuasiHomNetwork::random({8, 64, 32, 4}, seed + 17 * net_id);
    std::vector<Layer> stripped = net.layers();
    for (auto& layer : stripped) layer.affine.bias.setZero();
    const QuasiHomNetwork bias_free(std::move(stripped));
    const Scalar bound = net.remainder_bound();
    for (int dir = 0; dir < 20; ++dir) {
      const Vector d = rng.normal_vector(8).normalized();
      for (Scalar lt = 0.0; lt <= 4.0; lt += 0.25) {
        const Vector x = std::pow(10.0, lt) * d;
        worst_ratio = std::max(worst_ratio, net.quasi_remainder(x).norm() / bound);
        zero_bias = std::max(zero_bias, bias_free.quasi_remainder(x).cwiseAbs().maxCoeff());
      }
    }
  }
  return {"quasi-homogeneity", worst_ratio <= 1.0 && zero_bias == 0.0,
          fmt("max remainder / bound %.3f, bias-free remainder %.1e", worst_ratio, zero_bias)};
}

AuditResult audit_determinism(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::CumSum;
  cfg.n = 64;
  cfg.seed = seed;
  cfg.fixed_alphas = {1e-2};
  cfg.delta_exponents = {4, 6, 8};
  const std::string first = to_csv(run_stability(cfg));
  cfg.jobs = 2;
  const std::string second = to_csv(run_stability(cfg));
  return {"determinism", first == second,
          first == second ? "identical CSV across reruns and job counts" : "CSV differs"};
}

std::vector<AuditResult> bound_check_audits(std::uint64_t seed) {
  return {audit_relative_subgradient(seed), audit_descent_bound(seed)};
}

std::vector<AuditResult> selftest_audits(std::uint64_t seed) {
  return {audit_adjoints(seed),   audit_gradients(seed),        audit_relative_subgradient(seed),
          audit_descent_bound(seed, 2000), audit_double_well(seed), audit_hull(),
          audit_ellipsoid(seed),  audit_quasi_homogeneity(seed), audit_determinism(seed)};
}

}  // namespace critreg
