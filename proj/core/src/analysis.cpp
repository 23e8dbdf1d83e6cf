#include "critreg/analysis.hpp"

#include <cmath>

namespace critreg {

EllipsoidCharacterization::EllipsoidCharacterization(LinearOperator op, Scalar alpha,
                                                     Vector center, Vector lin_vec, Scalar budget)
    : op_(std::move(op)),
      alpha_(alpha),
      center_(std::move(center)),
      lin_vec_(std::move(lin_vec)),
      budget_(budget) {}

EllipsoidCharacterization EllipsoidCharacterization::build(const LinearOperator& op,
                                                           const Vector& y, Scalar alpha,
                                                           Scalar phi_at_center) {
  if (!(alpha > 0.0)) throw InvalidArgument("ellipsoid: alpha must be > 0");
  Matrix normal = op.gram();
  normal.diagonal().array() += alpha;
  Eigen::LLT<Matrix> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError("ellipsoid: normal equations not positive definite");
  }
  Vector center = llt.solve(op.adjoint_apply(y));
  return build_at(op, y, alpha, center, phi_at_center);
}

EllipsoidCharacterization EllipsoidCharacterization::build_at(const LinearOperator& op,
                                                              const Vector& y, Scalar alpha,
                                                              const Vector& center,
                                                              Scalar phi_at_center) {
  if (!(alpha > 0.0)) throw InvalidArgument("ellipsoid: alpha must be > 0");
  if (!(phi_at_center >= 0.0)) throw InvalidArgument("ellipsoid: phi must be >= 0");
  require_length(center, op.domain_dim(), "ellipsoid center");
  Vector lin = op.adjoint_apply(op.apply(center)) + alpha * center - op.adjoint_apply(y);
  return EllipsoidCharacterization(op, alpha, center, std::move(lin), alpha * phi_at_center);
}

Vector EllipsoidCharacterization::quad_apply(const Vector& x0) const {
  return op_.adjoint_apply(op_.apply(x0)) + alpha_ * x0;
}

Scalar EllipsoidCharacterization::form(const Vector& x0) const {
  require_length(x0, center_.size(), "ellipsoid point");
  return x0.dot(lin_vec_) + 0.5 * x0.dot(quad_apply(x0));
}

bool EllipsoidCharacterization::contains(const Vector& x0) const { return form(x0) <= budget_; }

// ---- double well -----------------------------------------------------------

Vector doublewell_closed_form(const Vector& k_diag, const Vector& y, Scalar alpha,
                              const DoubleWell& dw, const std::vector<KernelChoice>& choice) {
  if (!(alpha > 0.0)) throw InvalidArgument("double well closed form: alpha must be > 0");
  const Index n = k_diag.size();
  require_length(y, n, "double well closed form data");
  require_length(dw.weights(), n, "double well closed form weights");
  if (!choice.empty() && static_cast<Index>(choice.size()) != n) {
    throw DimensionError("double well closed form: one kernel choice per component required");
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    const Scalar k = k_diag(i);
    const Scalar w = dw.weights()(i);
    if (k == 0.0) {
      const bool well = !choice.empty() && choice[static_cast<std::size_t>(i)] == KernelChoice::Well;
      x(i) = well ? w : 0.0;
      continue;
    }
    const Scalar denom = k * k + alpha;
    const Scalar left = k * y(i) / denom;
    x(i) = left <= dw.q() * w ? left : (alpha * w + k * y(i)) / denom;
  }
  return x;
}

Vector doublewell_residual(const Vector& k_diag, const Vector& y, Scalar alpha,
                           const DoubleWell& dw, const Vector& x) {
  const Vector g = dw.rel_subgradient(x);
  return k_diag.cwiseProduct(k_diag.cwiseProduct(x) - y) + alpha * g;
}

HullSolution hull_critical_point(const Vector& k_diag, const Vector& y, Scalar alpha,
                                 const DoubleWellHull& hull) {
  if (!(alpha > 0.0)) throw InvalidArgument("hull critical point: alpha must be > 0");
  const Index n = k_diag.size();
  require_length(y, n, "hull critical point data");
  require_length(hull.weights(), n, "hull critical point weights");

  HullSolution sol{Vector(n), std::vector<bool>(static_cast<std::size_t>(n), false)};
  for (Index i = 0; i < n; ++i) {
    const Scalar k = k_diag(i);
    const Scalar w = hull.weights()(i);
    const Scalar lo = hull.lower_junction(i);
    const Scalar hi = hull.upper_junction(i);
    const Scalar slope = (hull.q() - 0.5) * w;
    if (k == 0.0) {
      // alpha * hull'(x) = 0: x = 0 always works; for q = 1/2 the hull is
      // flat on [0, w] and every point there is critical.
      sol.x(i) = 0.0;
      sol.multiplicity[static_cast<std::size_t>(i)] = slope == 0.0;
      continue;
    }
    const Scalar denom = k * k + alpha;
    const Scalar left = k * y(i) / denom;
    const Scalar right = (alpha * w + k * y(i)) / denom;
    const Scalar middle = (k * y(i) - alpha * slope) / (k * k);
    if (left <= lo) {
      sol.x(i) = left;
    } else if (right >= hi) {
      sol.x(i) = right;
    } else {
      // The objective is strictly convex in x_i, so the affine piece must
      // hold the root when neither quadratic piece does.
      sol.x(i) = std::min(std::max(middle, lo), hi);
    }
  }
  return sol;
}

std::vector<Scalar> normality_check(const Regularizer& reg, const Vector& x_plus,
                                    const std::vector<Vector>& basis) {
  std::vector<Scalar> out;
  out.reserve(basis.size());
  if (basis.empty()) return out;
  const Vector g = reg.rel_subgradient(x_plus);
  for (const Vector& e : basis) {
    require_length(e, x_plus.size(), "normality basis vector");
    out.push_back(std::abs(g.dot(e)));
  }
  return out;
}

}  // namespace critreg
