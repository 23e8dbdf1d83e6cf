#include "critreg/analysis.hpp"
#include "critreg/random.hpp"
#include "critreg/solvers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace critreg;

namespace {

Vector vec(std::initializer_list<Scalar> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (Scalar x : v) out(i++) = x;
  return out;
}

TikhonovProblem quadratic(const LinearOperator& op, Vector y, Scalar alpha) {
  return TikhonovProblem(NormDiscrepancy(op), std::make_shared<SquaredNormReg>(), alpha,
                         std::move(y));
}

Vector normal_equation_solution(const LinearOperator& op, const Vector& y, Scalar alpha) {
  Matrix l = op.gram();
  l.diagonal().array() += alpha;
  return l.llt().solve(op.adjoint_apply(y));
}

}  // namespace

TEST(Tikhonov, ValueExamples) {
  const auto zero = quadratic(LinearOperator::identity(2), Vector::Zero(2), 1.0);
  EXPECT_EQ(zero.value(Vector::Zero(2)), 0.0);
  EXPECT_EQ(zero.gradient(Vector::Zero(2)), Vector::Zero(2));
  const auto p = quadratic(LinearOperator::identity(1), vec({0}), 0.5);
  EXPECT_DOUBLE_EQ(p.value(vec({1})), 0.75);
}

TEST(Tikhonov, ValueIsDiscrepancyPlusScaledRegularizer) {
  Rng rng(51);
  const auto op = LinearOperator::cumulative_sum(6);
  const auto reg = std::make_shared<SeparableQuartic>();
  const TikhonovProblem p(NormDiscrepancy(op), reg, 0.3, rng.normal_vector(6));
  for (int t = 0; t < 20; ++t) {
    const Vector x = rng.normal_vector(6);
    EXPECT_DOUBLE_EQ(p.value(x), p.discrepancy().value(x, p.data()) + 0.3 * reg->value(x));
  }
}

TEST(Tikhonov, GradientVanishesAtNormalEquationSolution) {
  Rng rng(52);
  const auto op = LinearOperator::cumulative_sum(10);
  const Vector y = rng.normal_vector(10);
  const auto p = quadratic(op, y, 0.1);
  EXPECT_LE(p.gradient(normal_equation_solution(op, y, 0.1)).norm(), 1e-10);
}

TEST(Tikhonov, GradientMatchesFiniteDifferences) {
  Rng rng(53);
  const TikhonovProblem p(NormDiscrepancy(LinearOperator::cumulative_sum(5)),
                          std::make_shared<SeparableQuartic>(), 0.2, rng.normal_vector(5));
  for (int t = 0; t < 50; ++t) {
    const Vector x = rng.normal_vector(5);
    Vector fd(5);
    for (Index i = 0; i < 5; ++i) {
      Vector xp = x, xm = x;
      xp(i) += 1e-5;
      xm(i) -= 1e-5;
      fd(i) = (p.value(xp) - p.value(xm)) / 2e-5;
    }
    const Vector g = p.gradient(x);
    EXPECT_LE((fd - g).norm(), 1e-6 * std::max<Scalar>(1.0, g.norm()));
  }
}

TEST(Tikhonov, RejectsBadParameters) {
  EXPECT_THROW(quadratic(LinearOperator::identity(2), Vector::Zero(2), 0.0), InvalidArgument);
  EXPECT_THROW(quadratic(LinearOperator::identity(2), Vector::Zero(3), 1.0), DimensionError);
}

TEST(StepSchedule, StepsAndSums) {
  const auto c = StepSchedule::constant(0.5);
  const auto s = StepSchedule::diminishing_sqrt(2.0);
  const auto h = StepSchedule::square_summable(3.0);
  EXPECT_EQ(c.step(7), 0.5);
  EXPECT_DOUBLE_EQ(s.step(4), 1.0);
  EXPECT_DOUBLE_EQ(h.step(3), 1.0);
  for (const auto& sch : {c, s, h}) {
    Scalar s1 = 0.0, s2 = 0.0;
    for (std::size_t n = 1; n <= 100; ++n) {
      s1 += sch.step(n);
      s2 += sch.step(n) * sch.step(n);
    }
    const auto [a, b] = sch.sums(100);
    EXPECT_NEAR(a, s1, 1e-12 * s1);
    EXPECT_NEAR(b, s2, 1e-12 * s2);
  }
  EXPECT_THROW(StepSchedule::constant(0.0), InvalidArgument);
}

TEST(SubgradientDescent, HalvesOnSquare) {
  Objective f{[](const Vector& x) { return x.squaredNorm(); },
              [](const Vector& x) -> Vector { return 2.0 * x; }};
  const auto r = rel_subgradient_descent(f, vec({1}), StepSchedule::constant(0.25), 10.0, 10);
  ASSERT_EQ(r.objective_history.size(), 11u);
  for (std::size_t i = 0; i < r.objective_history.size(); ++i) {
    EXPECT_EQ(r.objective_history[i], std::ldexp(1.0, -2 * static_cast<int>(i)));
  }
  EXPECT_EQ(r.final_x(0), std::ldexp(1.0, -10));
  EXPECT_EQ(r.best_x, r.final_x);
  EXPECT_EQ(r.clip_activations, 0u);
}

TEST(SubgradientDescent, StopsImmediatelyAtZeroGradient) {
  Objective f{[](const Vector& x) { return x.squaredNorm(); },
              [](const Vector& x) -> Vector { return 2.0 * x; }};
  const auto r = rel_subgradient_descent(f, vec({0, 0}), StepSchedule::constant(0.25));
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.termination, Termination::Tolerance);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.best_x, vec({0, 0}));
}

TEST(SubgradientDescent, ClipsLongSubgradients) {
  Objective f{[](const Vector& x) { return x.squaredNorm(); },
              [](const Vector& x) -> Vector { return 2.0 * x; }};
  const auto r = rel_subgradient_descent(f, vec({100}), StepSchedule::constant(1.0), 1.0, 3);
  EXPECT_EQ(r.clip_activations, 3u);
  EXPECT_DOUBLE_EQ(r.final_x(0), 97.0);
}

TEST(SubgradientDescent, NonFiniteObjectiveNamesIterate) {
  Objective f{[](const Vector& x) { return x(0) > 3.5 ? std::nan("") : -x(0); },
              [](const Vector& x) -> Vector { return -Vector::Ones(x.size()); }};
  try {
    rel_subgradient_descent(f, vec({0}), StepSchedule::constant(1.0), 10.0, 10);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.iterate(), 4u);
  }
}

TEST(SubgradientDescent, DescentGuaranteeHoldsForQuarticObjective) {
  Rng rng(54);
  Matrix k(6, 6);
  for (Index j = 0; j < 6; ++j) k.col(j) = rng.normal_vector(6);
  const auto reg = std::make_shared<SeparableQuartic>();
  const Scalar alpha = 0.1;
  const TikhonovProblem p(NormDiscrepancy(LinearOperator::dense(k)), reg, alpha,
                          rng.normal_vector(6));
  const Vector x0 = rng.uniform_vector(6, -2.0, 2.0);
  const Scalar clip = 1e3;
  const std::size_t steps = 2000;
  for (const auto& sch : {StepSchedule::constant(1e-3), StepSchedule::diminishing_sqrt(1e-2),
                          StepSchedule::square_summable(1e-2)}) {
    const auto r = rel_subgradient_descent(make_objective(p), x0, sch, clip, steps);
    ASSERT_EQ(r.clip_activations, 0u);
    const Scalar best = *std::min_element(r.objective_history.begin(), r.objective_history.end());
    EXPECT_EQ(best, r.best_value());
    for (int probe = 0; probe < 50; ++probe) {
      const Vector u = rng.uniform_vector(6, -3.0, 3.0);
      const Scalar rhs =
          descent_bound(p.value(u) + alpha * reg->phi_bound(u), x0, u, sch, clip, r.iterations);
      EXPECT_LE(best, rhs);
    }
  }
}

TEST(Nesterov, QuadraticReachesClosedForm) {
  const auto p = quadratic(LinearOperator::identity(1), vec({1}), 1.0);
  NesterovOptions opt;
  opt.max_iter = 200;
  opt.grad_tol = 1e-12;
  const auto r = nesterov(p, vec({0}), opt);
  EXPECT_NEAR(r.final_x(0), 0.5, 1e-8);
  EXPECT_LE(r.iterations, 200u);
  EXPECT_TRUE(r.converged);
}

TEST(Nesterov, ReturnsImmediatelyWhenToleranceMetAtStart) {
  const auto p = quadratic(LinearOperator::identity(2), vec({1, 2}), 1.0);
  const auto r = nesterov(p, vec({0.5, 1.0}));
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.termination, Termination::Tolerance);
  EXPECT_EQ(r.final_x, vec({0.5, 1.0}));
}

TEST(Nesterov, BestValueIsMinimumOfHistory) {
  Rng rng(55);
  const TikhonovProblem p(NormDiscrepancy(LinearOperator::cumulative_sum(16)),
                          std::make_shared<SeparableQuartic>(), 1e-2, rng.normal_vector(16));
  const auto r = nesterov(p, Vector::Zero(16));
  ASSERT_FALSE(r.objective_history.empty());
  const Scalar best = *std::min_element(r.objective_history.begin(), r.objective_history.end());
  EXPECT_EQ(best, r.best_value());
  EXPECT_EQ(p.value(r.best_x), best);
}

TEST(Newton, QuadraticConvergesInOneStep) {
  Rng rng(56);
  const auto op = LinearOperator::cumulative_sum(12);
  const Vector y = rng.normal_vector(12);
  const auto p = quadratic(op, y, 0.05);
  NewtonOptions opt;
  opt.grad_tol = 1e-10;
  const auto r = newton(p, Vector::Zero(12), opt);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_TRUE(r.converged);
  const Vector exact = normal_equation_solution(op, y, 0.05);
  EXPECT_LE((r.final_x - exact).norm(), 1e-10 * exact.norm());
}

TEST(Newton, ReturnsImmediatelyAtCriticalPoint) {
  const auto p = quadratic(LinearOperator::identity(2), vec({2, 4}), 1.0);
  const auto r = newton(p, vec({1, 2}));
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.termination, Termination::Tolerance);
  EXPECT_EQ(r.grad_norm, 0.0);
}

TEST(Newton, ReproducesDoubleWellClosedForm) {
  const Vector k = vec({1.0, 2.0, 0.5, 1.5});
  const Vector y = vec({0.5, 3.0, 2.0, -1.0});
  const Scalar alpha = 1.0;
  const auto dw = std::make_shared<DoubleWell>(0.75, vec({1.0, 1.0, 2.0, 0.5}));
  const Vector closed = doublewell_closed_form(k, y, alpha, *dw, {});
  const TikhonovProblem p(NormDiscrepancy(LinearOperator::diagonal(k)), dw, alpha, y);
  // Start in the same branch as the closed form.
  const Vector x0 = closed + vec({0.01, -0.01, 0.01, 0.01});
  NewtonOptions opt;
  opt.grad_tol = 1e-13;
  const auto r = newton(p, x0, opt);
  EXPECT_LE((r.final_x - closed).norm(), 1e-8);
}

TEST(Newton, AgreesWithConvergedNesterov) {
  Rng rng(57);
  const Vector k = rng.uniform_vector(20, 0.5, 2.0);
  const TikhonovProblem p(NormDiscrepancy(LinearOperator::diagonal(k)),
                          std::make_shared<SeparableQuartic>(), 0.05, rng.normal_vector(20));
  NesterovOptions nopt;
  nopt.max_iter = 5000;
  nopt.grad_tol = 1e-9;
  const auto nes = nesterov(p, Vector::Zero(20), nopt);
  ASSERT_TRUE(nes.converged);
  NewtonOptions wopt;
  wopt.grad_tol = 1e-13;
  const auto nwt = newton(p, nes.final_x, wopt);
  EXPECT_LE((nwt.final_x - nes.final_x).norm(), 1e-6);
  EXPECT_LE(nwt.grad_norm, nes.grad_norm);
}

TEST(Newton, CriticalPointSatisfiesRelativeCharacterization) {
  // Separable problem: T(x) <= inf (T + alpha phi), the infimum bounded from
  // above by a per-component grid search.
  const Vector k = vec({1.0, 0.3, 2.0, 0.0, 1.2});
  const Vector y = vec({1.5, -0.4, 3.0, 0.0, -1.1});
  const Scalar alpha = 0.2;
  const auto reg = std::make_shared<SeparableQuartic>();
  const TikhonovProblem p(NormDiscrepancy(LinearOperator::diagonal(k)), reg, alpha, y);
  NesterovOptions nopt;
  nopt.max_iter = 2000;
  NewtonOptions wopt;
  wopt.grad_tol = 1e-12;
  const auto r = newton(p, nesterov(p, Vector::Zero(5), nopt).final_x, wopt);
  ASSERT_LE(r.grad_norm, 1e-10);
  Scalar inf_bound = 0.0;
  for (Index i = 0; i < 5; ++i) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (int j = 0; j <= 100000; ++j) {
      const Scalar t = -5.0 + 1e-4 * j;
      const Scalar res = k(i) * t - y(i);
      best = std::min(best, 0.5 * res * res + alpha * (reg->psi(t) + reg->phi_component(t)));
    }
    inf_bound += best;
  }
  EXPECT_LE(p.value(r.final_x), inf_bound + 1e-10);
}

TEST(Newton, SingularJacobianIsShiftedOnce) {
  // Only x_0 is seen by K or R, so J = diag(2, 0) at every iterate.
  class FirstCoordinate final : public Regularizer {
   public:
    Scalar value(const Vector& x) const override { return 0.5 * x(0) * x(0); }
    Vector rel_subgradient(const Vector& x) const override { return vec({x(0), 0.0}); }
    std::optional<Vector> diag_curvature(const Vector&) const override { return vec({1, 0}); }
    std::string name() const override { return "first-coordinate"; }
  };
  const TikhonovProblem p(NormDiscrepancy(LinearOperator::diagonal(vec({1, 0}))),
                          std::make_shared<FirstCoordinate>(), 1.0, vec({1, 0}));
  NewtonOptions opt;
  opt.grad_tol = 1e-12;
  const auto r = newton(p, vec({0, 3}), opt);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.final_x(0), 0.5, 1e-12);
  EXPECT_EQ(r.final_x(1), 3.0);
}

TEST(Solvers, DeterministicHistories) {
  Rng rng(58);
  const TikhonovProblem p(NormDiscrepancy(LinearOperator::cumulative_sum(24)),
                          std::make_shared<SeparableQuartic>(), 1e-3, rng.normal_vector(24));
  const auto a = nesterov(p, Vector::Zero(24));
  const auto b = nesterov(p, Vector::Zero(24));
  EXPECT_EQ(a.objective_history, b.objective_history);
  const auto c = newton(p, a.final_x);
  const auto d = newton(p, b.final_x);
  EXPECT_EQ(c.objective_history, d.objective_history);
  EXPECT_EQ(c.final_x, d.final_x);
}

TEST(CheckInexact, Examples) {
  const auto p = quadratic(LinearOperator::identity(2), vec({2, 4}), 0.5);
  const auto exact = check_inexact(p, vec({2, 4}) / 1.5, 1e-12);
  EXPECT_LE(exact.ratio, 1e-15);
  EXPECT_TRUE(exact.norm_ok);
  EXPECT_TRUE(exact.sign_ok);

  EXPECT_TRUE(check_inexact(p, Vector::Zero(2), 0.0).sign_ok);

  const Vector xc = vec({2, 4}) / 1.5;
  const Vector d = vec({0.6, -0.8});
  const Scalar r1 = check_inexact(p, xc + 1e-3 * d, 0.0).ratio;
  const Scalar r2 = check_inexact(p, xc + 2e-3 * d, 0.0).ratio;
  EXPECT_NEAR(r2 / r1, 2.0, 1e-6);
}

TEST(CheckInexact, ConvergedRunsPassTheirOwnTolerance) {
  Rng rng(59);
  const Scalar alpha = 1e-2;
  const TikhonovProblem p(NormDiscrepancy(LinearOperator::cumulative_sum(32)),
                          std::make_shared<SeparableQuartic>(), alpha, rng.normal_vector(32));
  NewtonOptions opt;
  opt.grad_tol = 1e-9;
  const auto r = newton(p, nesterov(p, Vector::Zero(32)).final_x, opt);
  ASSERT_TRUE(r.converged);
  const auto chk = check_inexact(p, r.final_x, opt.grad_tol / alpha);
  EXPECT_TRUE(chk.norm_ok);
  EXPECT_EQ(chk.sign_ok, r.sign_ok);
}
