// Numerical study protocol: synthetic signal, forward operators, noise model,
// stability and convergence sweeps, normality study, CSV and SVG output.
#pragma once

#include "critreg/linear_operator.hpp"
#include "critreg/regularizer.hpp"
#include "critreg/solvers.hpp"
#include "critreg/tikhonov.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace critreg {

enum class ProblemKind { Inpainting, CumSum };

std::string to_string(ProblemKind p);
/// Accepts "inpainting" or "cumsum".
ProblemKind parse_problem(const std::string& s);

struct SolverConfig {
  std::size_t nesterov_max_iter = 500;
  std::size_t newton_max_iter = 50;
  /// Runs stop once ||z|| / alpha <= grad_tol. The default sits below what
  /// double precision reaches, so solves end on Newton's stall test.
  Scalar grad_tol = 1e-14;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Inpainting;
  Scalar drop_fraction = 0.5;
  Index n = 512;
  std::uint64_t seed = 1;
  Scalar rho = 2.0;
  Scalar beta = 0.1;
  std::vector<Scalar> fixed_alphas{1e-2, 1e-3, 1e-4};
  std::vector<Scalar> q_exponents{1.0, 1.5};
  std::vector<int> delta_exponents{4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  Scalar reference_delta = 1e-16;
  SolverConfig solver;
  std::string output_dir = ".";
  /// Upper bound on concurrently solved cells; results do not depend on it.
  unsigned jobs = 1;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Bad configuration value; `field()` is the JSON path of the culprit.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string field, const std::string& what)
      : InvalidArgument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Overlays the keys present in `json_text` onto `base`. Keys:
///   problem, drop_fraction, n, seed, rho, beta, alphas, q, delta_exps
///   ([lo, hi] inclusive or an explicit list), reference_delta,
///   solver.{nesterov_max_iter, newton_max_iter, grad_tol}, output_dir, jobs.
/// Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// f(t) = exp(-t^2) cos(t) (t - 0.5)^2 + sin(t^2) at t_i = -1 + 2 i / (n - 1).
Vector sample_grid(Index n);
Vector make_signal(Index n);

/// Each index dropped independently with probability drop_fraction; the
/// draw repeats with the next generator output if every index was dropped.
LinearOperator make_inpainting(Index n, Scalar drop_fraction, std::uint64_t seed);

/// y_true + delta xi / ||xi||, xi standard normal.
Vector make_noisy_data(const Vector& y_true, Scalar delta, std::uint64_t seed);

/// Seed of the noise draw for delta = 10^-k.
std::uint64_t noise_seed(std::uint64_t seed, int k);

struct Setup {
  LinearOperator op;
  Vector x_true;
  Vector y_true;
  std::shared_ptr<const SeparableQuartic> reg;
};

Setup make_setup(const ExperimentConfig& cfg);

struct PipelineReport {
  SolveReport report;
  InexactCheck inexact;
};

/// Nesterov from x0 (zero when absent), then Newton from its output. The
/// returned history is Nesterov's followed by Newton's. Solver errors are
/// rethrown with `context` prepended.
PipelineReport solve_pipeline(const TikhonovProblem& problem, const ExperimentConfig& cfg,
                              const std::optional<Vector>& x0 = std::nullopt,
                              const std::string& context = "");

struct RunRecord {
  std::string study;
  ProblemKind problem = ProblemKind::Inpainting;
  Scalar alpha = 0.0;
  Scalar delta = 0.0;
  std::optional<Scalar> q;
  std::string metric;
  Scalar value = 0.0;
  bool sign_ok = true;
  Scalar grad_ratio = 0.0;
};

/// ||x_alpha^delta - x_alpha|| per fixed alpha and delta = 10^-k.
std::vector<RunRecord> run_stability(const ExperimentConfig& cfg);

/// Metrics "residual" (||K x - y_true||) and "error" (||x - x_plus||) for
/// alpha = delta^q. x_plus is x_true for CumSum and the reference solve at
/// reference_delta for Inpainting.
std::vector<RunRecord> run_convergence(const ExperimentConfig& cfg);

struct NormalityResult {
  Vector x_plus;
  std::vector<Index> kernel;
  std::vector<Scalar> values;  // |<R'(x_plus), e_i>| per kernel index
  Scalar grad_norm = 0.0;      // ||R'(x_plus)||
  PipelineReport pipeline;
};

/// Reference solve at reference_delta with alpha = reference_delta^q for the
/// first q; requires the Inpainting problem.
NormalityResult run_normality(const ExperimentConfig& cfg);
std::vector<RunRecord> normality_records(const ExperimentConfig& cfg, const NormalityResult& r);

/// Same reference solve with the kernel coordinates of x0 set to `kernel_value`.
NormalityResult run_kernel_initialization(const ExperimentConfig& cfg, Scalar kernel_value);

/// Header `study,problem,alpha,delta,q,metric,value,sign_ok,grad_ratio`,
/// numbers in %.16e, empty q for studies without one.
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::string to_csv(const std::vector<RunRecord>& records);

/// Log-log plot of value against delta, one polyline per (alpha or q, metric).
std::string to_svg(const std::vector<RunRecord>& records, const std::string& title);

}  // namespace critreg
