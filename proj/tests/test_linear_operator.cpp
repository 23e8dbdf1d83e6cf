#include "critreg/linear_operator.hpp"
#include "critreg/random.hpp"

#include <gtest/gtest.h>

using namespace critreg;

namespace {

Vector vec(std::initializer_list<Scalar> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (Scalar x : v) out(i++) = x;
  return out;
}

// Columns are K e_j.
Matrix materialize(const LinearOperator& op) {
  Matrix m(op.range_dim(), op.domain_dim());
  for (Index j = 0; j < op.domain_dim(); ++j) {
    m.col(j) = op.apply(Vector::Unit(op.domain_dim(), j));
  }
  return m;
}

std::vector<LinearOperator> sample_ops(Rng& rng) {
  Vector d = rng.normal_vector(9);
  d(2) = 0.0;
  d(7) = 0.0;
  Matrix dense(5, 9);
  for (Index j = 0; j < 9; ++j) dense.col(j) = rng.normal_vector(5);
  return {LinearOperator::diagonal(d), LinearOperator::mask(9, {1, 3, 4, 8}),
          LinearOperator::cumulative_sum(9), LinearOperator::dense(dense)};
}

}  // namespace

TEST(LinearOperator, ApplyExamples) {
  EXPECT_EQ(LinearOperator::cumulative_sum(3).apply(vec({1, 2, 3})), vec({1, 3, 6}));
  EXPECT_EQ(LinearOperator::mask(3, {0, 2}).apply(vec({5, 6, 7})), vec({5, 7}));
  EXPECT_EQ(LinearOperator::diagonal(vec({2, 0, 1})).apply(vec({1, 1, 1})), vec({2, 0, 1}));
}

TEST(LinearOperator, AdjointExamples) {
  EXPECT_EQ(LinearOperator::cumulative_sum(3).adjoint_apply(vec({1, 1, 1})), vec({3, 2, 1}));
  EXPECT_EQ(LinearOperator::mask(3, {0, 2}).adjoint_apply(vec({5, 7})), vec({5, 0, 7}));
  EXPECT_EQ(LinearOperator::diagonal(vec({2, 0, 1})).adjoint_apply(vec({1, 1, 1})),
            vec({2, 0, 1}));
}

TEST(LinearOperator, AdjointMatchesBruteForceTranspose) {
  Rng rng(11);
  for (const auto& op : sample_ops(rng)) {
    const Matrix kt = materialize(op).transpose();
    for (Index i = 0; i < op.range_dim(); ++i) {
      const Vector e = Vector::Unit(op.range_dim(), i);
      EXPECT_LE((op.adjoint_apply(e) - kt.col(i)).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(LinearOperator, AdjointIdentityOnRandomPairs) {
  Rng rng(12);
  for (const auto& op : sample_ops(rng)) {
    for (int t = 0; t < 1000; ++t) {
      const Vector x = rng.normal_vector(op.domain_dim());
      const Vector y = rng.normal_vector(op.range_dim());
      const Scalar lhs = op.apply(x).dot(y);
      const Scalar rhs = x.dot(op.adjoint_apply(y));
      EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max<Scalar>(1.0, std::abs(lhs)));
    }
  }
}

TEST(LinearOperator, GramMatchesMaterializedProduct) {
  Rng rng(13);
  for (const auto& op : sample_ops(rng)) {
    const Matrix k = materialize(op);
    EXPECT_LE((op.gram() - k.transpose() * k).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LinearOperator, NormalOperatorIsPositiveSemidefinite) {
  Rng rng(14);
  for (const auto& op : sample_ops(rng)) {
    for (int t = 0; t < 100; ++t) {
      const Vector x = rng.normal_vector(op.domain_dim());
      EXPECT_GE(x.dot(op.adjoint_apply(op.apply(x))), 0.0);
    }
  }
}

TEST(LinearOperator, KernelBasisExamples) {
  const auto mask = LinearOperator::mask(3, {0, 2}).kernel_basis();
  ASSERT_EQ(mask.size(), 1u);
  EXPECT_EQ(mask[0], Vector::Unit(3, 1));

  EXPECT_TRUE(LinearOperator::cumulative_sum(4).kernel_basis().empty());

  const auto diag = LinearOperator::diagonal(vec({2, 0, 1})).kernel_basis();
  ASSERT_EQ(diag.size(), 1u);
  EXPECT_EQ(diag[0], Vector::Unit(3, 1));
}

TEST(LinearOperator, KernelVectorsMapToExactZero) {
  Rng rng(15);
  for (const auto& op : sample_ops(rng)) {
    if (std::holds_alternative<DenseOp>(op.variant())) continue;
    for (const Vector& e : op.kernel_basis()) EXPECT_EQ(op.apply(e).norm(), 0.0);
  }
}

TEST(LinearOperator, DenseKernelIsUnsupported) {
  const auto op = LinearOperator::dense(Matrix::Identity(2, 2));
  EXPECT_THROW(op.kernel_basis(), UnsupportedOperation);
}

TEST(LinearOperator, RejectsMalformedInput) {
  EXPECT_THROW(LinearOperator::mask(3, {2, 0}), InvalidArgument);
  EXPECT_THROW(LinearOperator::mask(3, {0, 0}), InvalidArgument);
  EXPECT_THROW(LinearOperator::mask(3, {3}), InvalidArgument);
  EXPECT_THROW(LinearOperator::mask(3, {}), InvalidArgument);
  EXPECT_THROW(LinearOperator::cumulative_sum(3).apply(vec({1, 2})), DimensionError);
  EXPECT_THROW(LinearOperator::mask(3, {0, 2}).adjoint_apply(vec({1, 2, 3})), DimensionError);
}

TEST(LinearOperator, PowerIterationFindsLargestEigenvalue) {
  const LinearOperator op = LinearOperator::cumulative_sum(64);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(op.gram());
  const Scalar exact = eig.eigenvalues().maxCoeff();
  EXPECT_NEAR(estimate_normal_norm(op), exact, 1e-8 * exact);
}

TEST(LinearOperator, CumulativeSumStaysAccurateOnLongInputs) {
  const Index n = 4096;
  Vector x = Vector::Constant(n, 0.1);
  const Vector y = LinearOperator::cumulative_sum(n).apply(x);
  for (Index i = 0; i < n; i += 511) {
    EXPECT_NEAR(y(i), 0.1 * static_cast<Scalar>(i + 1), 1e-13 * static_cast<Scalar>(i + 1));
  }
}
