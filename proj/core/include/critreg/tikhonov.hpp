// Tikhonov functional T(x) = S(x, y) + alpha R(x).
#pragma once

#include "critreg/discrepancy.hpp"
#include "critreg/regularizer.hpp"

#include <memory>

namespace critreg {

class TikhonovProblem {
 public:
  TikhonovProblem(NormDiscrepancy discrepancy, std::shared_ptr<const Regularizer> regularizer,
                  Scalar alpha, Vector data);

  const NormDiscrepancy& discrepancy() const { return discrepancy_; }
  const Regularizer& regularizer() const { return *regularizer_; }
  std::shared_ptr<const Regularizer> regularizer_ptr() const { return regularizer_; }
  const LinearOperator& op() const { return discrepancy_.op(); }
  Scalar alpha() const { return alpha_; }
  const Vector& data() const { return data_; }
  Index dim() const { return discrepancy_.op().domain_dim(); }

  Scalar value(const Vector& x) const;

  /// z = S'(x, y) + alpha R'(x); the quantity every inexactness check uses.
  Vector gradient(const Vector& x) const;

  /// Same problem with different data.
  TikhonovProblem with_data(Vector data) const;
  TikhonovProblem with_alpha(Scalar alpha) const;

 private:
  NormDiscrepancy discrepancy_;
  std::shared_ptr<const Regularizer> regularizer_;
  Scalar alpha_;
  Vector data_;
};

}  // namespace critreg
