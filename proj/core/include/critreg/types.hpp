// Common numeric types and the error hierarchy used across critreg.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace critreg {

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input has the wrong length or shape for the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input or output contains NaN/Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Operation is not available for this operator variant.
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// Gradient requested at a point where the functional is not differentiable.
class NondifferentiablePoint : public Error {
 public:
  using Error::Error;
};

/// Parameter outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative solver produced a non-finite objective.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iterate)
      : Error(what + " (iterate " + std::to_string(iterate) + ")"),
        detail_(what),
        iterate_(iterate) {}
  std::size_t iterate() const noexcept { return iterate_; }
  /// Message without the iterate suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t iterate_;
};

/// Linear system could not be factorized even after the diagonal shift.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

inline void require_length(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
  }
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entry");
}

}  // namespace critreg
