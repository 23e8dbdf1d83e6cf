// Seeded random numbers with a fixed, documented algorithm.
//
// Engine: std::mt19937_64 (its output sequence is fixed by the C++ standard).
// uniform():  (engine() >> 11) * 2^-53, in [0, 1).
// normal():   Box-Muller on two uniforms u1, u2 with u1 mapped to (0, 1],
//             returning sqrt(-2 ln u1) cos(2 pi u2) and caching the sine
//             partner for the next call.
#pragma once

#include "critreg/types.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

namespace critreg {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Scalar uniform() { return static_cast<Scalar>(engine_() >> 11) * 0x1.0p-53; }

  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  Scalar normal() {
    if (spare_) {
      const Scalar v = *spare_;
      spare_.reset();
      return v;
    }
    const Scalar u1 = 1.0 - uniform();
    const Scalar u2 = uniform();
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    const Scalar theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

  bool bernoulli(Scalar p) { return uniform() < p; }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Vector uniform_vector(Index n, Scalar lo, Scalar hi) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::optional<Scalar> spare_;
};

}  // namespace critreg
