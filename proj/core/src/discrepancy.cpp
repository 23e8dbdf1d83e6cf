#include "critreg/discrepancy.hpp"

#include <cmath>

namespace critreg {

NormDiscrepancy::NormDiscrepancy(LinearOperator op, Scalar p)
    : op_(std::make_shared<const LinearOperator>(std::move(op))), p_(p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw InvalidArgument("norm discrepancy: exponent must be >= 1");
  }
}

Vector NormDiscrepancy::residual(const Vector& x, const Vector& y) const {
  require_length(y, op_->range_dim(), "discrepancy data");
  return op_->apply(x) - y;
}

Scalar NormDiscrepancy::value(const Vector& x, const Vector& y) const {
  const Scalar r = residual(x, y).norm();
  if (p_ == 2.0) return 0.5 * r * r;
  return std::pow(r, p_) / p_;
}

Vector NormDiscrepancy::gradient(const Vector& x, const Vector& y) const {
  const Vector r = residual(x, y);
  if (p_ == 2.0) return op_->adjoint_apply(r);
  const Scalar nr = r.norm();
  if (nr == 0.0) {
    if (p_ == 1.0) throw NondifferentiablePoint("norm discrepancy with p = 1 at zero residual");
    return Vector::Zero(op_->domain_dim());
  }
  return std::pow(nr, p_ - 2.0) * op_->adjoint_apply(r);
}

Scalar NormDiscrepancy::comparability_constant() const { return std::pow(2.0, p_ - 1.0); }

}  // namespace critreg
