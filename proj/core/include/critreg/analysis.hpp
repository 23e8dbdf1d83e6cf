// Closed forms and diagnostics for critical points.
#pragma once

#include "critreg/linear_operator.hpp"
#include "critreg/regularizer.hpp"

#include <vector>

namespace critreg {

/// For R = ||x||^2/2 and S = ||Kx - y||^2/2 the alpha*phi-critical points
/// x = center + x0 of T are exactly the x0 with
///     <x0, r> + 1/2 <x0, L x0> <= alpha * phi(center),
/// where L = K^T K + alpha I and r = L center - K^T y.
class EllipsoidCharacterization {
 public:
  const Vector& center() const { return center_; }
  const Vector& lin_vec() const { return lin_vec_; }
  Scalar budget() const { return budget_; }
  Scalar alpha() const { return alpha_; }

  /// L x0.
  Vector quad_apply(const Vector& x0) const;

  /// Left-hand side of the membership inequality.
  Scalar form(const Vector& x0) const;

  bool contains(const Vector& x0) const;

  /// Centers the ellipsoid at the Tikhonov minimizer (K^T K + alpha I)^{-1} K^T y.
  static EllipsoidCharacterization build(const LinearOperator& op, const Vector& y, Scalar alpha,
                                         Scalar phi_at_center);
  /// Same construction around an arbitrary center (for example the minimizer
  /// of T + alpha phi); `lin_vec` then picks up the normal-equation residual.
  static EllipsoidCharacterization build_at(const LinearOperator& op, const Vector& y,
                                            Scalar alpha, const Vector& center,
                                            Scalar phi_at_center);

 private:
  EllipsoidCharacterization(LinearOperator op, Scalar alpha, Vector center, Vector lin_vec,
                            Scalar budget);

  LinearOperator op_;
  Scalar alpha_;
  Vector center_;
  Vector lin_vec_;
  Scalar budget_;
};

enum class KernelChoice { Zero, Well };

/// Critical points of 1/2 ||Kx - y||^2 + alpha sum r_i(x_i) for diagonal K,
/// solved per component. Components with k_i = 0 take 0 or w_i per `choice`;
/// an empty `choice` selects 0 everywhere.
Vector doublewell_closed_form(const Vector& k_diag, const Vector& y, Scalar alpha,
                              const DoubleWell& dw, const std::vector<KernelChoice>& choice);

/// Residual k_i (k_i x_i - y_i) + alpha r_i'(x_i) per component.
Vector doublewell_residual(const Vector& k_diag, const Vector& y, Scalar alpha,
                           const DoubleWell& dw, const Vector& x);

struct HullSolution {
  Vector x;
  /// True where the solution set is the whole interval [0, w_i]
  /// (k_i = 0 and q = 1/2); x_i holds the representative 0.
  std::vector<bool> multiplicity;
};

/// Critical point of the same problem with the double well replaced by its
/// convex hull.
HullSolution hull_critical_point(const Vector& k_diag, const Vector& y, Scalar alpha,
                                 const DoubleWellHull& hull);

/// |<R'(x_plus), e>| for every basis vector e.
std::vector<Scalar> normality_check(const Regularizer& reg, const Vector& x_plus,
                                    const std::vector<Vector>& basis);

}  // namespace critreg
