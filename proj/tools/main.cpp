// critreg command-line tool.
//
// Exit status: 0 success, 1 runtime error or failed audit, 2 bad
// configuration or usage, 3 solver divergence or singular system.

#include "critreg/analysis.hpp"
#include "critreg/audits.hpp"
#include "critreg/experiments.hpp"
#include "critreg/random.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace critreg;
namespace fs = std::filesystem;

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2, kSolver = 3 };

struct Flags {
  std::string config;
  std::string problem;
  Index n = 0;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double beta = 0.0;
  std::string alphas;
  std::string q;
  std::string delta_exps;
  double grad_tol = 0.0;
  std::string out;
  std::string format = "csv";
  unsigned jobs = 1;
};

std::vector<double> split_numbers(const std::string& s, const std::string& field) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string path = field + "[" + std::to_string(out.size()) + "]";
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(path, "expected a number, got '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(field, "expected a comma-separated list of numbers");
  return out;
}

/// Config file first, then flags given on the command line; CRITREG_OUT
/// supplies output_dir when neither sets it.
ExperimentConfig resolve_config(const CLI::App& app, const Flags& f) {
  ExperimentConfig cfg;
  if (const char* env = std::getenv("CRITREG_OUT"); env && *env) cfg.output_dir = env;
  if (!f.config.empty()) cfg = load_config(f.config, cfg);

  nlohmann::json overlay = nlohmann::json::object();
  auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  if (given("--problem")) overlay["problem"] = f.problem;
  if (given("--n")) overlay["n"] = f.n;
  if (given("--seed")) overlay["seed"] = f.seed;
  if (given("--rho")) overlay["rho"] = f.rho;
  if (given("--beta")) overlay["beta"] = f.beta;
  if (given("--alphas")) overlay["alphas"] = split_numbers(f.alphas, "alphas");
  if (given("--q")) overlay["q"] = split_numbers(f.q, "q");
  if (given("--delta-exps")) overlay["delta_exps"] = f.delta_exps;
  if (given("--grad-tol")) overlay["solver"]["grad_tol"] = f.grad_tol;
  if (given("--out")) overlay["output_dir"] = f.out;
  if (given("--jobs")) overlay["jobs"] = f.jobs;
  return parse_config(overlay.dump(), cfg);
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

fs::path write_file(const ExperimentConfig& cfg, const std::string& name,
                    const std::string& content) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return path;
}

void emit_study(const ExperimentConfig& cfg, const Flags& f, const std::string& study,
                const std::vector<RunRecord>& records) {
  const std::string stem = study + "_" + to_string(cfg.problem);
  const fs::path csv = write_file(cfg, stem + ".csv", to_csv(records));
  std::cout << "wrote " << records.size() << " records to " << csv.string() << "\n";
  std::size_t flagged = 0;
  for (const auto& r : records) flagged += !r.sign_ok;
  if (flagged > 0) std::cout << "sign condition violated in " << flagged << " records\n";
  if (f.format != "csv+svg") return;

  std::vector<std::string> metrics;
  for (const auto& r : records) {
    if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) {
      metrics.push_back(r.metric);
    }
  }
  for (const auto& m : metrics) {
    std::vector<RunRecord> subset;
    for (const auto& r : records) {
      if (r.metric == m) subset.push_back(r);
    }
    const std::string name = metrics.size() == 1 ? stem : stem + "_" + m;
    const fs::path svg = write_file(cfg, name + ".svg", to_svg(subset, study + " " + m));
    std::cout << "wrote " << svg.string() << "\n";
  }
}

int cmd_signal(const ExperimentConfig& cfg) {
  const Vector t = sample_grid(cfg.n);
  const Vector x = make_signal(cfg.n);
  for (Index i = 0; i < cfg.n; ++i) std::cout << sci(t(i)) << ',' << sci(x(i)) << '\n';
  return kOk;
}

int cmd_normality(const ExperimentConfig& cfg, const Flags& f) {
  const NormalityResult r = run_normality(cfg);
  emit_study(cfg, f, "normality", normality_records(cfg, r));
  const SeparableQuartic quartic(cfg.rho, cfg.beta);
  const auto stationary = quartic.stationary_points();
  double worst = 0.0;
  double farthest = 0.0;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    worst = std::max(worst, r.values[i]);
    double nearest = INFINITY;
    for (double s : stationary) nearest = std::min(nearest, std::abs(r.x_plus(r.kernel[i]) - s));
    farthest = std::max(farthest, nearest);
  }
  std::printf("kernel size %zu\nmax |<R'(x+), e_i>| = %.3e (threshold %.3e)\n"
              "max distance of kernel entries to a stationary point = %.3e\n",
              r.values.size(), worst, 1e-6 * (1.0 + r.grad_norm), farthest);
  return kOk;
}

int cmd_doublewell_demo(const ExperimentConfig& cfg, const CLI::App& app) {
  const double q = app.get_option("--q")->count() ? cfg.q_exponents.front() : 0.75;
  const double alpha = cfg.fixed_alphas.front();
  const Index n = 8;
  const Vector k = (Vector(n) << 0.0, 1.0, 0.5, 0.0, 2.0, 1.0, 0.0, 1.5).finished();
  Rng rng(cfg.seed);
  const Vector y = rng.uniform_vector(n, -1.0, 3.0);
  const Vector w = rng.uniform_vector(n, 0.5, 2.0);

  std::optional<DoubleWell> well;
  try {
    well.emplace(q, w);
  } catch (const InvalidArgument& e) {
    throw ConfigError("q", e.what());
  }
  const DoubleWellHull hull(*well);
  const Vector zero =
      doublewell_closed_form(k, y, alpha, *well, std::vector<KernelChoice>(n, KernelChoice::Zero));
  const Vector in_well =
      doublewell_closed_form(k, y, alpha, *well, std::vector<KernelChoice>(n, KernelChoice::Well));
  const HullSolution h = hull_critical_point(k, y, alpha, hull);

  std::printf("# q = %g, alpha = %g\n", q, alpha);
  std::printf("i,k,y,w,closed_zero,closed_well,hull,hull_interval\n");
  for (Index i = 0; i < n; ++i) {
    std::printf("%td,%g,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", i, k(i), y(i), w(i), zero(i), in_well(i),
                h.x(i), h.multiplicity[static_cast<std::size_t>(i)] ? "[0,w]" : "-");
  }
  return kOk;
}

int cmd_audits(const std::vector<AuditResult>& results) {
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.pass;
  }
  return ok ? kOk : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical-point regularization studies for Tikhonov functionals"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Flags f;

  app.add_option("--config", f.config, "JSON config file; flags below override its keys")
      ->check(CLI::ExistingFile);
  app.add_option("--problem", f.problem, "inpainting|cumsum (config: problem, default inpainting)")
      ->check(CLI::IsMember({"inpainting", "cumsum"}));
  app.add_option("--n", f.n, "signal length (config: n, default 512)");
  app.add_option("--seed", f.seed, "PRNG seed for mask and noise (config: seed, default 1)");
  app.add_option("--rho", f.rho, "quartic well position (config: rho, default 2)");
  app.add_option("--beta", f.beta, "quartic quadratic weight (config: beta, default 0.1)");
  app.add_option("--alphas", f.alphas,
                 "fixed alphas F,F,... (config: alphas, default 1e-2,1e-3,1e-4)");
  app.add_option("--q", f.q,
                 "exponents of alpha = delta^q F,F (config: q, default 1,1.5); "
                 "doublewell-demo uses the first as the well parameter (default 0.75)");
  app.add_option("--delta-exps", f.delta_exps,
                 "noise levels delta = 10^-k for k in I..I (config: delta_exps, default 4..14)");
  app.add_option("--grad-tol", f.grad_tol,
                 "stop once ||z|| / alpha falls below this (config: solver.grad_tol, default "
                 "1e-14)");
  app.add_option("--out", f.out,
                 "output directory (config: output_dir, default $CRITREG_OUT or .)");
  app.add_option("--format", f.format, "csv|csv+svg (default csv)")
      ->check(CLI::IsMember({"csv", "csv+svg"}));
  app.add_option("--jobs", f.jobs, "concurrent study cells (config: jobs, default 1)")
      ->check(CLI::Range(1u, 1024u));
  app.footer(
      "Config file keys: problem, drop_fraction, n, seed, rho, beta, alphas, q, delta_exps,\n"
      "reference_delta, solver.{nesterov_max_iter, newton_max_iter, grad_tol}, output_dir, "
      "jobs.\n"
      "Exit status: 0 ok, 1 runtime error or failed audit, 2 bad config or usage,\n"
      "3 solver divergence or singular system.");

  auto* signal = app.add_subcommand("signal", "print t,f(t) for the synthetic signal");
  auto* stability = app.add_subcommand("stability", "||x_alpha^delta - x_alpha|| per fixed alpha");
  auto* convergence =
      app.add_subcommand("convergence", "residual and error for alpha = delta^q");
  auto* normality = app.add_subcommand("normality", "|<R'(x+), e_i>| over the inpainting kernel");
  auto* demo = app.add_subcommand("doublewell-demo",
                                  "closed-form double-well critical points against the hull");
  auto* bound = app.add_subcommand("bound-check",
                                   "audit the relative-subgradient inequality and descent bound");
  auto* selftest = app.add_subcommand("selftest", "run every invariant audit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const ExperimentConfig cfg = resolve_config(app, f);
    if (signal->parsed()) return cmd_signal(cfg);
    if (stability->parsed()) {
      emit_study(cfg, f, "stability", run_stability(cfg));
      return kOk;
    }
    if (convergence->parsed()) {
      emit_study(cfg, f, "convergence", run_convergence(cfg));
      return kOk;
    }
    if (normality->parsed()) return cmd_normality(cfg, f);
    if (demo->parsed()) return cmd_doublewell_demo(cfg, app);
    if (bound->parsed()) return cmd_audits(bound_check_audits(cfg.seed));
    if (selftest->parsed()) return cmd_audits(selftest_audits(cfg.seed));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "solver diverged: " << e.what() << "\n";
    return kSolver;
  } catch (const SingularSystemError& e) {
    std::cerr << "singular system: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}
