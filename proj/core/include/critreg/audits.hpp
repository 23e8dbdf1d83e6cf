// Self-contained invariant checks, runnable from the command line.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace critreg {

struct AuditResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// <Kx, y> = <x, K^T y> for every operator variant.
AuditResult audit_adjoints(std::uint64_t seed);
/// Analytic gradients against central differences (h = 1e-5), relative
/// error <= 1e-6 on `points` random points per functional.
AuditResult audit_gradients(std::uint64_t seed, std::size_t points = 100);
/// R(x) + <R'(x), u - x> <= R(u) + phi(u) for the quartic on `pairs` random
/// pairs in [-5, 5]^8.
AuditResult audit_relative_subgradient(std::uint64_t seed, std::size_t pairs = 1000);
/// Descent guarantee of relative subgradient descent on an 8-dimensional
/// quartic problem, for every step schedule and `probes` random probes.
AuditResult audit_descent_bound(std::uint64_t seed, std::size_t steps = 10000,
                                std::size_t probes = 50);
/// Closed-form double-well critical points zero the componentwise residual
/// and agree with Newton started in the same branch.
AuditResult audit_double_well(std::uint64_t seed);
/// Hull solution on kernel components and the q = 1/2 multiplicity flag.
AuditResult audit_hull();
/// Ellipsoid membership equals the value comparison it encodes.
AuditResult audit_ellipsoid(std::uint64_t seed);
/// ReLU quasi remainder stays below its bound and vanishes without biases.
AuditResult audit_quasi_homogeneity(std::uint64_t seed);
/// A small stability study produces identical CSV twice.
AuditResult audit_determinism(std::uint64_t seed);

/// Relative-subgradient inequality and descent guarantee.
std::vector<AuditResult> bound_check_audits(std::uint64_t seed);
/// Every audit above.
std::vector<AuditResult> selftest_audits(std::uint64_t seed);

}  // namespace critreg
