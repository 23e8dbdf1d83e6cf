// Linear forward operators K : X -> Y with adjoints and exact kernel bases.
#pragma once

#include "critreg/types.hpp"

#include <variant>
#include <vector>

namespace critreg {

/// Pointwise multiplication (Kx)_i = k_i x_i. Square and self-adjoint.
struct DiagonalOp {
  Vector diag;
};

/// Coordinate selection. `kept` is sorted, unique and 0-based.
struct MaskOp {
  Index domain_dim = 0;
  std::vector<Index> kept;
};

/// Lower-triangular matrix of ones: (Kx)_i = x_0 + ... + x_i.
struct CumulativeSumOp {
  Index dim = 0;
};

/// General dense matrix (range_dim x domain_dim).
struct DenseOp {
  Matrix matrix;
};

class LinearOperator {
 public:
  using Variant = std::variant<DiagonalOp, MaskOp, CumulativeSumOp, DenseOp>;

  static LinearOperator diagonal(Vector diag);
  static LinearOperator mask(Index domain_dim, std::vector<Index> kept);
  static LinearOperator cumulative_sum(Index dim);
  static LinearOperator dense(Matrix matrix);
  static LinearOperator identity(Index dim);

  Index domain_dim() const;
  Index range_dim() const;

  Vector apply(const Vector& x) const;
  Vector adjoint_apply(const Vector& y) const;

  /// Standard basis vectors e_i spanning ker(K). Available for the structured
  /// variants only; Dense throws UnsupportedOperation.
  std::vector<Vector> kernel_basis() const;

  /// Indices i with K e_i = 0 (same information as kernel_basis, without the
  /// vectors).
  std::vector<Index> kernel_indices() const;

  /// K^T K as a dense matrix.
  Matrix gram() const;

  const Variant& variant() const { return op_; }

 private:
  explicit LinearOperator(Variant op) : op_(std::move(op)) {}
  Variant op_;
};

/// Largest eigenvalue of K^T K by power iteration from a fixed start vector.
Scalar estimate_normal_norm(const LinearOperator& op, int max_iter = 500,
                            Scalar rel_tol = 1e-12);

}  // namespace critreg
