#include "critreg/tikhonov.hpp"

#include <cmath>

namespace critreg {

TikhonovProblem::TikhonovProblem(NormDiscrepancy discrepancy,
                                 std::shared_ptr<const Regularizer> regularizer, Scalar alpha,
                                 Vector data)
    : discrepancy_(std::move(discrepancy)),
      regularizer_(std::move(regularizer)),
      alpha_(alpha),
      data_(std::move(data)) {
  if (!regularizer_) throw InvalidArgument("tikhonov: null regularizer");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw InvalidArgument("tikhonov: alpha must be > 0");
  require_length(data_, discrepancy_.op().range_dim(), "tikhonov data");
  require_finite(data_, "tikhonov data");
}

Scalar TikhonovProblem::value(const Vector& x) const {
  require_length(x, dim(), "tikhonov value");
  return discrepancy_.value(x, data_) + alpha_ * regularizer_->value(x);
}

Vector TikhonovProblem::gradient(const Vector& x) const {
  require_length(x, dim(), "tikhonov gradient");
  return discrepancy_.gradient(x, data_) + alpha_ * regularizer_->rel_subgradient(x);
}

TikhonovProblem TikhonovProblem::with_data(Vector data) const {
  return TikhonovProblem(discrepancy_, regularizer_, alpha_, std::move(data));
}

TikhonovProblem TikhonovProblem::with_alpha(Scalar alpha) const {
  return TikhonovProblem(discrepancy_, regularizer_, alpha, data_);
}

}  // namespace critreg
