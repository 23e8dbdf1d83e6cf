#include "critreg/regularizer.hpp"

#include <algorithm>
#include <cmath>

namespace critreg {

// ---- SquaredNormReg -------------------------------------------------------

Scalar SquaredNormReg::value(const Vector& x) const { return 0.5 * x.squaredNorm(); }

Vector SquaredNormReg::rel_subgradient(const Vector& x) const { return x; }

std::optional<Vector> SquaredNormReg::diag_curvature(const Vector& x) const {
  return Vector::Ones(x.size());
}

// ---- SeparableQuartic -----------------------------------------------------

SeparableQuartic::SeparableQuartic(Scalar rho, Scalar beta) : rho_(rho), beta_(beta) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("quartic: rho must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("quartic: beta must be > 0");
}

Scalar SeparableQuartic::quartic(Scalar t) const {
  const Scalar a = t - rho_;
  const Scalar b = t + 0.5 * rho_;
  return a * a * b * b;
}

Scalar SeparableQuartic::dquartic(Scalar t) const {
  const Scalar a = t - rho_;
  const Scalar b = t + 0.5 * rho_;
  return 2.0 * a * b * b + 2.0 * a * a * b;
}

Scalar SeparableQuartic::d2quartic(Scalar t) const {
  const Scalar a = t - rho_;
  const Scalar b = t + 0.5 * rho_;
  return 2.0 * b * b + 8.0 * a * b + 2.0 * a * a;
}

Scalar SeparableQuartic::psi(Scalar t) const { return quartic(t) + 0.5 * beta_ * t * t; }
Scalar SeparableQuartic::dpsi(Scalar t) const { return dquartic(t) + beta_ * t; }
Scalar SeparableQuartic::d2psi(Scalar t) const { return d2quartic(t) + beta_; }

Scalar SeparableQuartic::value(const Vector& x) const {
  Scalar sum = 0.0;
  for (Index i = 0; i < x.size(); ++i) sum += psi(x(i));
  return sum;
}

Vector SeparableQuartic::rel_subgradient(const Vector& x) const {
  return x.unaryExpr([this](Scalar t) { return dpsi(t); });
}

std::optional<Vector> SeparableQuartic::diag_curvature(const Vector& x) const {
  return Vector(x.unaryExpr([this](Scalar t) { return d2psi(t); }));
}

std::array<Scalar, 2> SeparableQuartic::inflection_points() const {
  const Scalar s3 = std::sqrt(3.0);
  return {rho_ * (1.0 - s3) / 4.0, rho_ * (1.0 + s3) / 4.0};
}

Scalar SeparableQuartic::phi_component(Scalar s) const {
  auto tangent_at = [&](Scalar t) { return quartic(t) + dquartic(t) * (s - t); };
  const auto infl = inflection_points();
  return std::max({tangent_at(s), tangent_at(infl[0]), tangent_at(infl[1])});
}

Scalar SeparableQuartic::phi_bound(const Vector& s) const {
  Scalar sum = 0.0;
  for (Index i = 0; i < s.size(); ++i) sum += phi_component(s(i));
  return sum;
}

std::vector<Scalar> SeparableQuartic::stationary_points() const {
  // psi'(t) = 4t^3 - 3 rho t^2 + (beta - 3 rho^2 / 2) t + rho^3 / 2.
  const Scalar c2 = -3.0 * rho_ / 4.0;
  const Scalar c1 = (beta_ - 1.5 * rho_ * rho_) / 4.0;
  const Scalar c0 = rho_ * rho_ * rho_ / 8.0;
  const Scalar bound = 1.0 + std::max({std::abs(c2), std::abs(c1), std::abs(c0)});

  auto bisect = [this](Scalar lo, Scalar hi) {
    Scalar flo = dpsi(lo);
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const Scalar mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const Scalar fmid = dpsi(mid);
      if ((fmid < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  // Split the real line at the zeros of psi'' so that psi' is monotone on
  // every piece, then bisect each piece with a sign change.
  std::vector<Scalar> knots{-bound};
  const Scalar disc = 36.0 * rho_ * rho_ - 48.0 * (beta_ - 1.5 * rho_ * rho_);
  if (disc > 0.0) {
    const Scalar r = std::sqrt(disc);
    knots.push_back((6.0 * rho_ - r) / 24.0);
    knots.push_back((6.0 * rho_ + r) / 24.0);
  }
  knots.push_back(bound);

  std::vector<Scalar> roots;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const Scalar lo = knots[k];
    const Scalar hi = knots[k + 1];
    const Scalar flo = dpsi(lo);
    const Scalar fhi = dpsi(hi);
    if (flo == 0.0) {
      if (roots.empty() || roots.back() != lo) roots.push_back(lo);
    } else if ((flo < 0.0) != (fhi < 0.0)) {
      roots.push_back(bisect(lo, hi));
    }
  }
  return roots;
}

// ---- DoubleWell -----------------------------------------------------------

namespace {

void validate_double_well(Scalar q, const Vector& w, const char* what) {
  if (!(q >= 0.5 && q < 1.0)) throw InvalidArgument(std::string(what) + ": q must be in [1/2, 1)");
  if (w.size() < 1) throw InvalidArgument(std::string(what) + ": empty weight vector");
  if (!w.allFinite() || (w.array() <= 0.0).any()) {
    throw InvalidArgument(std::string(what) + ": weights must be finite and > 0");
  }
}

}  // namespace

DoubleWell::DoubleWell(Scalar q, Vector weights) : q_(q), w_(std::move(weights)) {
  validate_double_well(q_, w_, "double well");
}

Scalar DoubleWell::component(Index i, Scalar t) const {
  const Scalar w = w_(i);
  if (t <= q_ * w) return 0.5 * t * t;
  const Scalar d = t - w;
  return 0.5 * d * d + (q_ - 0.5) * w * w;
}

Scalar DoubleWell::dcomponent(Index i, Scalar t) const {
  const Scalar w = w_(i);
  return t <= q_ * w ? t : t - w;
}

Scalar DoubleWell::value(const Vector& x) const {
  require_length(x, w_.size(), "double well");
  Scalar sum = 0.0;
  for (Index i = 0; i < x.size(); ++i) sum += component(i, x(i));
  return sum;
}

Vector DoubleWell::rel_subgradient(const Vector& x) const {
  require_length(x, w_.size(), "double well");
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) g(i) = dcomponent(i, x(i));
  return g;
}

std::optional<Vector> DoubleWell::diag_curvature(const Vector& x) const {
  require_length(x, w_.size(), "double well");
  return Vector::Ones(x.size());
}

// ---- DoubleWellHull -------------------------------------------------------

DoubleWellHull::DoubleWellHull(Scalar q, Vector weights) : q_(q), w_(std::move(weights)) {
  validate_double_well(q_, w_, "double well hull");
}

Scalar DoubleWellHull::component(Index i, Scalar t) const {
  const Scalar w = w_(i);
  const Scalar m = (q_ - 0.5) * w;
  if (t <= lower_junction(i)) return 0.5 * t * t;
  if (t >= upper_junction(i)) {
    const Scalar d = t - w;
    return 0.5 * d * d + (q_ - 0.5) * w * w;
  }
  return m * t - 0.5 * m * m;
}

Scalar DoubleWellHull::dcomponent(Index i, Scalar t) const {
  const Scalar w = w_(i);
  if (t <= lower_junction(i)) return t;
  if (t >= upper_junction(i)) return t - w;
  return (q_ - 0.5) * w;
}

Scalar DoubleWellHull::value(const Vector& x) const {
  require_length(x, w_.size(), "double well hull");
  Scalar sum = 0.0;
  for (Index i = 0; i < x.size(); ++i) sum += component(i, x(i));
  return sum;
}

Vector DoubleWellHull::rel_subgradient(const Vector& x) const {
  require_length(x, w_.size(), "double well hull");
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) g(i) = dcomponent(i, x(i));
  return g;
}

std::optional<Vector> DoubleWellHull::diag_curvature(const Vector& x) const {
  require_length(x, w_.size(), "double well hull");
  Vector c(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const bool affine = x(i) > lower_junction(i) && x(i) < upper_junction(i);
    c(i) = affine ? 0.0 : 1.0;
  }
  return c;
}

}  // namespace critreg
