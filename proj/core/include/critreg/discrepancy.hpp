// Norm discrepancy S(x, y) = (1/p) ||Kx - y||^p.
#pragma once

#include "critreg/linear_operator.hpp"

#include <memory>

namespace critreg {

class NormDiscrepancy {
 public:
  explicit NormDiscrepancy(LinearOperator op, Scalar p = 2.0);

  const LinearOperator& op() const { return *op_; }
  Scalar exponent() const { return p_; }

  Scalar value(const Vector& x, const Vector& y) const;

  /// ||Kx - y||^{p-2} K^T (Kx - y). Throws NondifferentiablePoint for p == 1
  /// at zero residual.
  Vector gradient(const Vector& x, const Vector& y) const;

  /// Residual Kx - y.
  Vector residual(const Vector& x, const Vector& y) const;

  /// Constant C = 2^{p-1} of the comparability bound
  ///   S(z, y) <= C (S(z, y_delta) + (1/p) ||y - y_delta||^p).
  Scalar comparability_constant() const;

 private:
  std::shared_ptr<const LinearOperator> op_;
  Scalar p_;
};

}  // namespace critreg
