#include "critreg/discrepancy.hpp"
#include "critreg/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace critreg;

namespace {

Vector vec(std::initializer_list<Scalar> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (Scalar x : v) out(i++) = x;
  return out;
}

LinearOperator random_dense(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) m.col(j) = rng.normal_vector(rows);
  return LinearOperator::dense(m);
}

}  // namespace

TEST(NormDiscrepancy, ValueExamples) {
  EXPECT_EQ(NormDiscrepancy(LinearOperator::identity(3)).value(vec({1, 2, 3}), vec({1, 2, 3})),
            0.0);
  EXPECT_DOUBLE_EQ(
      NormDiscrepancy(LinearOperator::cumulative_sum(2)).value(vec({1, 1}), vec({0, 0})), 2.5);
  EXPECT_DOUBLE_EQ(NormDiscrepancy(LinearOperator::diagonal(vec({2}))).value(vec({1}), vec({0})),
                   2.0);
}

TEST(NormDiscrepancy, GradientExamples) {
  const NormDiscrepancy id(LinearOperator::identity(1));
  EXPECT_EQ(id.gradient(vec({3}), vec({1})), vec({2}));
  EXPECT_EQ(id.gradient(vec({1}), vec({1})), vec({0}));
  const NormDiscrepancy cs(LinearOperator::cumulative_sum(2));
  EXPECT_EQ(cs.gradient(vec({1, 1}), vec({0, 0})), vec({3, 2}));
}

TEST(NormDiscrepancy, GradientMatchesFiniteDifferences) {
  Rng rng(21);
  for (Scalar p : {1.5, 2.0, 3.0}) {
    const NormDiscrepancy d(random_dense(rng, 5, 7), p);
    for (int t = 0; t < 50; ++t) {
      const Vector x = rng.normal_vector(7);
      const Vector y = rng.normal_vector(5);
      Vector fd(7);
      for (Index i = 0; i < 7; ++i) {
        const Scalar h = 1e-5;
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        fd(i) = (d.value(xp, y) - d.value(xm, y)) / (2 * h);
      }
      const Vector g = d.gradient(x, y);
      EXPECT_LE((fd - g).norm(), 1e-6 * g.norm()) << "p = " << p;
    }
  }
}

TEST(NormDiscrepancy, PEqualOneAtZeroResidualIsNondifferentiable) {
  const NormDiscrepancy d(LinearOperator::identity(2), 1.0);
  EXPECT_THROW(d.gradient(vec({1, 2}), vec({1, 2})), NondifferentiablePoint);
  EXPECT_NO_THROW(d.gradient(vec({1, 2}), vec({0, 2})));
}

TEST(NormDiscrepancy, ComparabilityConditionHolds) {
  Rng rng(22);
  for (Scalar p : {1.0, 1.5, 2.0, 4.0}) {
    const NormDiscrepancy d(random_dense(rng, 4, 6), p);
    EXPECT_DOUBLE_EQ(d.comparability_constant(), std::pow(2.0, p - 1.0));
    for (int t = 0; t < 500; ++t) {
      const Vector z = rng.normal_vector(6);
      const Vector y = rng.normal_vector(4);
      const Vector yd = y + rng.uniform(0.0, 3.0) * rng.normal_vector(4);
      const Scalar lhs = d.value(z, y);
      const Scalar rhs = d.comparability_constant() *
                         (d.value(z, yd) + std::pow((y - yd).norm(), p) / p);
      EXPECT_LE(lhs, rhs * (1 + 1e-12));
    }
  }
}

TEST(NormDiscrepancy, ConvexInFirstArgument) {
  Rng rng(23);
  const NormDiscrepancy d(random_dense(rng, 4, 6), 1.5);
  for (int t = 0; t < 500; ++t) {
    const Vector a = rng.normal_vector(6);
    const Vector b = rng.normal_vector(6);
    const Vector y = rng.normal_vector(4);
    EXPECT_LE(d.value(0.5 * (a + b), y), 0.5 * (d.value(a, y) + d.value(b, y)) + 1e-12);
  }
}

TEST(NormDiscrepancy, RejectsBadInput) {
  EXPECT_THROW(NormDiscrepancy(LinearOperator::identity(2), 0.5), InvalidArgument);
  const NormDiscrepancy d(LinearOperator::identity(2));
  EXPECT_THROW(d.value(vec({1}), vec({1, 2})), DimensionError);
}
