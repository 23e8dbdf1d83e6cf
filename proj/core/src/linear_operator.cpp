#include "critreg/linear_operator.hpp"

#include <algorithm>
#include <cmath>

namespace critreg {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Running sum with Neumaier compensation; keeps prefix sums of long signals
// accurate to a few ulps instead of O(n) ulps.
class CompensatedSum {
 public:
  void add(Scalar v) {
    const Scalar t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_ = 0.0;
  Scalar comp_ = 0.0;
};

}  // namespace

LinearOperator LinearOperator::diagonal(Vector diag) {
  if (diag.size() < 1) throw InvalidArgument("diagonal operator: empty diagonal");
  require_finite(diag, "diagonal operator");
  return LinearOperator(DiagonalOp{std::move(diag)});
}

LinearOperator LinearOperator::mask(Index domain_dim, std::vector<Index> kept) {
  if (domain_dim < 1) throw InvalidArgument("mask operator: domain_dim must be positive");
  if (kept.empty()) throw InvalidArgument("mask operator: kept set is empty");
  if (!std::is_sorted(kept.begin(), kept.end()) ||
      std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw InvalidArgument("mask operator: kept indices must be sorted and unique");
  }
  if (kept.front() < 0 || kept.back() >= domain_dim) {
    throw InvalidArgument("mask operator: kept index out of range");
  }
  return LinearOperator(MaskOp{domain_dim, std::move(kept)});
}

LinearOperator LinearOperator::cumulative_sum(Index dim) {
  if (dim < 1) throw InvalidArgument("cumulative sum operator: dim must be positive");
  return LinearOperator(CumulativeSumOp{dim});
}

LinearOperator LinearOperator::dense(Matrix matrix) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw InvalidArgument("dense operator: empty matrix");
  }
  if (!matrix.allFinite()) throw NonFiniteError("dense operator: non-finite entry");
  return LinearOperator(DenseOp{std::move(matrix)});
}

LinearOperator LinearOperator::identity(Index dim) {
  return diagonal(Vector::Ones(dim));
}

Index LinearOperator::domain_dim() const {
  return std::visit(Overloaded{
                        [](const DiagonalOp& d) { return d.diag.size(); },
                        [](const MaskOp& m) { return m.domain_dim; },
                        [](const CumulativeSumOp& c) { return c.dim; },
                        [](const DenseOp& d) { return d.matrix.cols(); },
                    },
                    op_);
}

Index LinearOperator::range_dim() const {
  return std::visit(Overloaded{
                        [](const DiagonalOp& d) { return d.diag.size(); },
                        [](const MaskOp& m) { return static_cast<Index>(m.kept.size()); },
                        [](const CumulativeSumOp& c) { return c.dim; },
                        [](const DenseOp& d) { return d.matrix.rows(); },
                    },
                    op_);
}

Vector LinearOperator::apply(const Vector& x) const {
  require_length(x, domain_dim(), "apply");
  return std::visit(Overloaded{
                        [&](const DiagonalOp& d) -> Vector { return d.diag.cwiseProduct(x); },
                        [&](const MaskOp& m) -> Vector {
                          Vector out(static_cast<Index>(m.kept.size()));
                          for (std::size_t j = 0; j < m.kept.size(); ++j) {
                            out(static_cast<Index>(j)) = x(m.kept[j]);
                          }
                          return out;
                        },
                        [&](const CumulativeSumOp& c) -> Vector {
                          Vector out(c.dim);
                          CompensatedSum acc;
                          for (Index i = 0; i < c.dim; ++i) {
                            acc.add(x(i));
                            out(i) = acc.value();
                          }
                          return out;
                        },
                        [&](const DenseOp& d) -> Vector { return d.matrix * x; },
                    },
                    op_);
}

Vector LinearOperator::adjoint_apply(const Vector& y) const {
  require_length(y, range_dim(), "adjoint_apply");
  return std::visit(Overloaded{
                        [&](const DiagonalOp& d) -> Vector { return d.diag.cwiseProduct(y); },
                        [&](const MaskOp& m) -> Vector {
                          Vector out = Vector::Zero(m.domain_dim);
                          for (std::size_t j = 0; j < m.kept.size(); ++j) {
                            out(m.kept[j]) = y(static_cast<Index>(j));
                          }
                          return out;
                        },
                        [&](const CumulativeSumOp& c) -> Vector {
                          // Transpose of lower-triangular ones: suffix sums.
                          Vector out(c.dim);
                          CompensatedSum acc;
                          for (Index i = c.dim - 1; i >= 0; --i) {
                            acc.add(y(i));
                            out(i) = acc.value();
                          }
                          return out;
                        },
                        [&](const DenseOp& d) -> Vector { return d.matrix.transpose() * y; },
                    },
                    op_);
}

std::vector<Index> LinearOperator::kernel_indices() const {
  return std::visit(
      Overloaded{
          [](const DiagonalOp& d) {
            std::vector<Index> idx;
            for (Index i = 0; i < d.diag.size(); ++i) {
              if (d.diag(i) == 0.0) idx.push_back(i);
            }
            return idx;
          },
          [](const MaskOp& m) {
            std::vector<Index> idx;
            std::size_t j = 0;
            for (Index i = 0; i < m.domain_dim; ++i) {
              if (j < m.kept.size() && m.kept[j] == i) {
                ++j;
              } else {
                idx.push_back(i);
              }
            }
            return idx;
          },
          [](const CumulativeSumOp&) { return std::vector<Index>{}; },
          [](const DenseOp&) -> std::vector<Index> {
            throw UnsupportedOperation("kernel basis is not available for dense operators");
          },
      },
      op_);
}

std::vector<Vector> LinearOperator::kernel_basis() const {
  const Index n = domain_dim();
  std::vector<Vector> basis;
  for (Index i : kernel_indices()) basis.push_back(Vector::Unit(n, i));
  return basis;
}

Matrix LinearOperator::gram() const {
  return std::visit(Overloaded{
                        [](const DiagonalOp& d) -> Matrix {
                          return d.diag.cwiseAbs2().asDiagonal();
                        },
                        [](const MaskOp& m) -> Matrix {
                          Matrix g = Matrix::Zero(m.domain_dim, m.domain_dim);
                          for (Index i : m.kept) g(i, i) = 1.0;
                          return g;
                        },
                        [](const CumulativeSumOp& c) -> Matrix {
                          // (K^T K)_{ij} = number of rows r >= max(i, j).
                          Matrix g(c.dim, c.dim);
                          for (Index j = 0; j < c.dim; ++j) {
                            for (Index i = 0; i < c.dim; ++i) {
                              g(i, j) = static_cast<Scalar>(c.dim - std::max(i, j));
                            }
                          }
                          return g;
                        },
                        [](const DenseOp& d) -> Matrix {
                          return d.matrix.transpose() * d.matrix;
                        },
                    },
                    op_);
}

Scalar estimate_normal_norm(const LinearOperator& op, int max_iter, Scalar rel_tol) {
  const Index n = op.domain_dim();
  // Deterministic, non-degenerate start vector.
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<Scalar>(i));
  v.normalize();
  Scalar lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = op.adjoint_apply(op.apply(v));
    const Scalar next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::abs(next - lambda) <= rel_tol * next) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace critreg
