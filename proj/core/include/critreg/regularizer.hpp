// Relatively sub-differentiable regularizers.
//
// A regularizer R : R^n -> [0, inf) exposes its value and one selection from
// the relative sub-differential. For a bound phi >= 0 a vector r belongs to
// that set at x when
//
//     R(x) + <r, u - x> <= R(u) + phi(u)   for every u.
//
// Every regularizer here is differentiable almost everywhere and returns its
// classical (or chain-rule) derivative as the selection.
#pragma once

#include "critreg/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace critreg {

class Regularizer {
 public:
  virtual ~Regularizer() = default;

  virtual Scalar value(const Vector& x) const = 0;
  virtual Vector rel_subgradient(const Vector& x) const = 0;

  /// Second derivative per component for separable regularizers; empty for
  /// regularizers without a diagonal Hessian.
  virtual std::optional<Vector> diag_curvature(const Vector& /*x*/) const {
    return std::nullopt;
  }

  virtual std::string name() const = 0;
};

/// R(x) = ||x||^2 / 2. Convex, so phi = 0 works.
class SquaredNormReg final : public Regularizer {
 public:
  Scalar value(const Vector& x) const override;
  Vector rel_subgradient(const Vector& x) const override;
  std::optional<Vector> diag_curvature(const Vector& x) const override;
  std::string name() const override { return "squared-norm"; }
};

/// R(x) = sum_i psi(x_i) with the double-well quartic
///   psi(t) = (t - rho)^2 (t + rho/2)^2 + (beta/2) t^2.
/// The pure quartic part f(t) = (t - rho)^2 (t + rho/2)^2 is non-convex; the
/// beta term is convex and contributes nothing to the bound.
class SeparableQuartic final : public Regularizer {
 public:
  explicit SeparableQuartic(Scalar rho = 2.0, Scalar beta = 0.1);

  Scalar rho() const { return rho_; }
  Scalar beta() const { return beta_; }

  Scalar value(const Vector& x) const override;
  Vector rel_subgradient(const Vector& x) const override;
  std::optional<Vector> diag_curvature(const Vector& x) const override;
  std::string name() const override { return "quartic"; }

  Scalar psi(Scalar t) const;
  Scalar dpsi(Scalar t) const;
  Scalar d2psi(Scalar t) const;

  Scalar quartic(Scalar t) const;
  Scalar dquartic(Scalar t) const;
  Scalar d2quartic(Scalar t) const;

  /// sup_t f(t) + f'(t)(s - t) for the pure quartic f. The derivative of the
  /// objective in t factors as f''(t)(s - t), so the supremum of this concave
  /// quartic is attained at t = s or at one of the two real roots of f''.
  Scalar phi_component(Scalar s) const;

  /// Sum of phi_component over the entries of s.
  Scalar phi_bound(const Vector& s) const;

  /// Roots of f'' (ascending): rho (1 -+ sqrt(3)) / 4.
  std::array<Scalar, 2> inflection_points() const;

  /// Real zeros of psi' in ascending order. For the usual small beta there
  /// are three: local minima near -rho/2 and rho around a local maximum.
  std::vector<Scalar> stationary_points() const;

 private:
  Scalar rho_;
  Scalar beta_;
};

/// Perturbed double well r_i(t) = t^2/2 for t <= q w_i and
/// (t - w_i)^2/2 + (q - 1/2) w_i^2 otherwise, q in [1/2, 1), w_i > 0.
class DoubleWell final : public Regularizer {
 public:
  DoubleWell(Scalar q, Vector weights);

  Scalar q() const { return q_; }
  const Vector& weights() const { return w_; }

  Scalar value(const Vector& x) const override;
  /// Left derivative q w_i at the kink.
  Vector rel_subgradient(const Vector& x) const override;
  std::optional<Vector> diag_curvature(const Vector& x) const override;
  std::string name() const override { return "double-well"; }

  Scalar component(Index i, Scalar t) const;
  Scalar dcomponent(Index i, Scalar t) const;

 private:
  Scalar q_;
  Vector w_;
};

/// Convex hull of DoubleWell. Quadratic outside ((q - 1/2) w_i, (q + 1/2) w_i)
/// and affine with slope (q - 1/2) w_i inside.
class DoubleWellHull final : public Regularizer {
 public:
  DoubleWellHull(Scalar q, Vector weights);
  explicit DoubleWellHull(const DoubleWell& dw) : DoubleWellHull(dw.q(), dw.weights()) {}

  Scalar q() const { return q_; }
  const Vector& weights() const { return w_; }

  Scalar value(const Vector& x) const override;
  Vector rel_subgradient(const Vector& x) const override;
  std::optional<Vector> diag_curvature(const Vector& x) const override;
  std::string name() const override { return "double-well-hull"; }

  Scalar component(Index i, Scalar t) const;
  Scalar dcomponent(Index i, Scalar t) const;
  Scalar lower_junction(Index i) const { return (q_ - 0.5) * w_(i); }
  Scalar upper_junction(Index i) const { return (q_ + 0.5) * w_(i); }

 private:
  Scalar q_;
  Vector w_;
};

}  // namespace critreg
