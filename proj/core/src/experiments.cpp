#include "critreg/experiments.hpp"

#include "critreg/analysis.hpp"
#include "critreg/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace critreg {

std::string to_string(ProblemKind p) {
  return p == ProblemKind::Inpainting ? "inpainting" : "cumsum";
}

ProblemKind parse_problem(const std::string& s) {
  if (s == "inpainting") return ProblemKind::Inpainting;
  if (s == "cumsum") return ProblemKind::CumSum;
  throw ConfigError("problem", "expected 'inpainting' or 'cumsum', got '" + s + "'");
}

// ---- configuration ---------------------------------------------------------

namespace {

void require_positive_list(const std::vector<Scalar>& v, const std::string& field) {
  if (v.empty()) throw ConfigError(field, "must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw ConfigError(field + "[" + std::to_string(i) + "]", "must be a finite value > 0");
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("n", "must be >= 2");
  if (n > NewtonOptions{}.dense_cap) {
    throw ConfigError("n", "exceeds the dense Newton cap " +
                               std::to_string(NewtonOptions{}.dense_cap));
  }
  if (!(drop_fraction > 0.0 && drop_fraction < 1.0)) {
    throw ConfigError("drop_fraction", "must lie in (0, 1)");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("rho", "must be a finite value > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta", "must be a finite value > 0");
  require_positive_list(fixed_alphas, "alphas");
  require_positive_list(q_exponents, "q");
  if (delta_exponents.empty()) throw ConfigError("delta_exps", "must not be empty");
  for (std::size_t i = 0; i < delta_exponents.size(); ++i) {
    if (delta_exponents[i] < 0 || delta_exponents[i] > 300) {
      throw ConfigError("delta_exps[" + std::to_string(i) + "]", "must lie in [0, 300]");
    }
  }
  if (!(reference_delta > 0.0) || !std::isfinite(reference_delta)) {
    throw ConfigError("reference_delta", "must be a finite value > 0");
  }
  if (solver.newton_max_iter < 1) throw ConfigError("solver.newton_max_iter", "must be >= 1");
  if (!(solver.grad_tol > 0.0) || !std::isfinite(solver.grad_tol)) {
    throw ConfigError("solver.grad_tol", "must be a finite value > 0");
  }
  if (jobs < 1) throw ConfigError("jobs", "must be >= 1");
}

namespace {

using nlohmann::json;

Scalar get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<Scalar>();
}

std::int64_t get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t get_unsigned(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw ConfigError(path, "expected a non-negative integer");
}

std::vector<Scalar> get_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<int> get_exponents(const json& j, const std::string& path) {
  if (j.is_string()) {
    // "lo..hi"
    const std::string s = j.get<std::string>();
    const auto dots = s.find("..");
    try {
      if (dots == std::string::npos) throw std::invalid_argument("missing '..'");
      std::size_t used_lo = 0;
      std::size_t used_hi = 0;
      const int lo = std::stoi(s.substr(0, dots), &used_lo);
      const int hi = std::stoi(s.substr(dots + 2), &used_hi);
      if (used_lo != dots || used_hi != s.size() - dots - 2 || lo > hi) {
        throw std::invalid_argument("bad range");
      }
      std::vector<int> out;
      for (int k = lo; k <= hi; ++k) out.push_back(k);
      return out;
    } catch (const std::exception&) {
      throw ConfigError(path, "expected a range 'lo..hi' with lo <= hi, got '" + s + "'");
    }
  }
  if (!j.is_array()) throw ConfigError(path, "expected \"lo..hi\" or an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(static_cast<int>(get_integer(j[i], path + "[" + std::to_string(i) + "]")));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig cfg) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<root>", "expected a JSON object");

  for (const auto& [key, value] : root.items()) {
    if (key == "problem") {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
      cfg.problem = parse_problem(value.get<std::string>());
    } else if (key == "drop_fraction") {
      cfg.drop_fraction = get_number(value, key);
    } else if (key == "n") {
      const auto n = get_integer(value, key);
      if (n < 2) throw ConfigError(key, "must be >= 2");
      cfg.n = static_cast<Index>(n);
    } else if (key == "seed") {
      cfg.seed = get_unsigned(value, key);
    } else if (key == "rho") {
      cfg.rho = get_number(value, key);
    } else if (key == "beta") {
      cfg.beta = get_number(value, key);
    } else if (key == "alphas") {
      cfg.fixed_alphas = get_number_list(value, key);
    } else if (key == "q") {
      cfg.q_exponents = get_number_list(value, key);
    } else if (key == "delta_exps") {
      cfg.delta_exponents = get_exponents(value, key);
    } else if (key == "reference_delta") {
      cfg.reference_delta = get_number(value, key);
    } else if (key == "output_dir") {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
      cfg.output_dir = value.get<std::string>();
    } else if (key == "jobs") {
      const auto jobs = get_integer(value, key);
      if (jobs < 1 || jobs > 1024) throw ConfigError(key, "must lie in [1, 1024]");
      cfg.jobs = static_cast<unsigned>(jobs);
    } else if (key == "solver") {
      if (!value.is_object()) throw ConfigError(key, "expected an object");
      for (const auto& [skey, svalue] : value.items()) {
        const std::string path = "solver." + skey;
        if (skey == "nesterov_max_iter") {
          cfg.solver.nesterov_max_iter = get_unsigned(svalue, path);
        } else if (skey == "newton_max_iter") {
          cfg.solver.newton_max_iter = get_unsigned(svalue, path);
        } else if (skey == "grad_tol") {
          cfg.solver.grad_tol = get_number(svalue, path);
        } else {
          throw ConfigError(path, "unknown key");
        }
      }
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

// ---- synthetic problems ----------------------------------------------------

Vector sample_grid(Index n) {
  if (n < 2) throw InvalidArgument("sample grid: n must be >= 2");
  Vector t(n);
  for (Index i = 0; i < n; ++i) {
    t(i) = -1.0 + 2.0 * static_cast<Scalar>(i) / static_cast<Scalar>(n - 1);
  }
  t(n - 1) = 1.0;
  return t;
}

Vector make_signal(Index n) {
  return sample_grid(n).unaryExpr([](Scalar t) {
    return std::exp(-t * t) * std::cos(t) * (t - 0.5) * (t - 0.5) + std::sin(t * t);
  });
}

LinearOperator make_inpainting(Index n, Scalar drop_fraction, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("inpainting: n must be >= 1");
  if (!(drop_fraction > 0.0 && drop_fraction < 1.0)) {
    throw InvalidArgument("inpainting: drop fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<Index> kept;
  while (kept.empty()) {
    for (Index i = 0; i < n; ++i) {
      if (!rng.bernoulli(drop_fraction)) kept.push_back(i);
    }
  }
  return LinearOperator::mask(n, std::move(kept));
}

Vector make_noisy_data(const Vector& y_true, Scalar delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("noisy data: delta must be finite and >= 0");
  }
  if (delta == 0.0) return y_true;
  Rng rng(seed);
  Vector xi = rng.normal_vector(y_true.size());
  while (xi.norm() == 0.0) xi = rng.normal_vector(y_true.size());
  return y_true + (delta / xi.norm()) * xi;
}

std::uint64_t noise_seed(std::uint64_t seed, int k) {
  return seed ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k));
}

Setup make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  LinearOperator op = cfg.problem == ProblemKind::Inpainting
                          ? make_inpainting(cfg.n, cfg.drop_fraction, cfg.seed)
                          : LinearOperator::cumulative_sum(cfg.n);
  Vector x_true = make_signal(cfg.n);
  Vector y_true = op.apply(x_true);
  return Setup{std::move(op), std::move(x_true), std::move(y_true),
               std::make_shared<const SeparableQuartic>(cfg.rho, cfg.beta)};
}

// ---- pipeline --------------------------------------------------------------

PipelineReport solve_pipeline(const TikhonovProblem& problem, const ExperimentConfig& cfg,
                              const std::optional<Vector>& x0, const std::string& context) {
  const Scalar tol = cfg.solver.grad_tol * problem.alpha();
  const std::string prefix = context.empty() ? "" : context + ": ";
  try {
    const Vector start = x0 ? *x0 : Vector::Zero(problem.dim());
    const SolveReport nest =
        nesterov(problem, start, NesterovOptions{cfg.solver.nesterov_max_iter, tol});
    NewtonOptions nopts;
    nopts.max_iter = cfg.solver.newton_max_iter;
    nopts.grad_tol = tol;
    SolveReport report = newton(problem, nest.final_x, nopts);

    std::vector<Scalar> history = nest.objective_history;
    history.insert(history.end(), report.objective_history.begin(),
                   report.objective_history.end());
    report.objective_history = std::move(history);
    if (nest.best_value() < problem.value(report.best_x)) report.best_x = nest.best_x;
    report.restarts += nest.restarts;

    const InexactCheck inexact = check_inexact(problem, report.final_x, cfg.solver.grad_tol);
    return PipelineReport{std::move(report), inexact};
  } catch (const DivergenceError& e) {
    throw DivergenceError(prefix + e.detail(), e.iterate());
  } catch (const SingularSystemError& e) {
    throw SingularSystemError(prefix + e.what());
  } catch (const UnsupportedOperation& e) {
    throw UnsupportedOperation(prefix + e.what());
  }
}

// ---- studies ---------------------------------------------------------------

namespace {

/// f(0), ..., f(count - 1) evaluated on up to `jobs` threads; results and the
/// first failing index are independent of scheduling.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, unsigned jobs, F f) {
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max(1u, jobs), count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

Scalar delta_of(int k) { return std::pow(10.0, -static_cast<Scalar>(k)); }

int reference_exponent(Scalar reference_delta) {
  return static_cast<int>(std::lround(-std::log10(reference_delta)));
}

std::string cell_context(const ExperimentConfig& cfg, const std::string& study, Scalar alpha,
                         Scalar delta) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s/%s alpha=%.3e delta=%.3e seed=%llu", study.c_str(),
                to_string(cfg.problem).c_str(), alpha, delta,
                static_cast<unsigned long long>(cfg.seed));
  return buf;
}

TikhonovProblem make_problem(const Setup& s, Scalar alpha, Vector data) {
  return TikhonovProblem(NormDiscrepancy(s.op), s.reg, alpha, std::move(data));
}

PipelineReport reference_solve(const ExperimentConfig& cfg, const Setup& s, Scalar q,
                               const std::optional<Vector>& x0) {
  const Scalar delta = cfg.reference_delta;
  const Scalar alpha = std::pow(delta, q);
  const Vector y = make_noisy_data(s.y_true, delta, noise_seed(cfg.seed,
                                                                reference_exponent(delta)));
  return solve_pipeline(make_problem(s, alpha, y), cfg, x0,
                        cell_context(cfg, "reference", alpha, delta));
}

}  // namespace

std::vector<RunRecord> run_stability(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  const auto& alphas = cfg.fixed_alphas;
  const auto& ks = cfg.delta_exponents;

  const auto clean = parallel_map<PipelineReport>(alphas.size(), cfg.jobs, [&](std::size_t a) {
    return solve_pipeline(make_problem(s, alphas[a], s.y_true), cfg, std::nullopt,
                          cell_context(cfg, "stability", alphas[a], 0.0));
  });
  const std::size_t cells = alphas.size() * ks.size();
  const auto noisy = parallel_map<PipelineReport>(cells, cfg.jobs, [&](std::size_t c) {
    const Scalar alpha = alphas[c / ks.size()];
    const int k = ks[c % ks.size()];
    const Scalar delta = delta_of(k);
    const Vector y = make_noisy_data(s.y_true, delta, noise_seed(cfg.seed, k));
    return solve_pipeline(make_problem(s, alpha, y), cfg, std::nullopt,
                          cell_context(cfg, "stability", alpha, delta));
  });

  std::vector<RunRecord> out;
  for (std::size_t c = 0; c < cells; ++c) {
    const std::size_t a = c / ks.size();
    const PipelineReport& ref = clean[a];
    const PipelineReport& run = noisy[c];
    RunRecord r;
    r.study = "stability";
    r.problem = cfg.problem;
    r.alpha = alphas[a];
    r.delta = delta_of(ks[c % ks.size()]);
    r.metric = "distance";
    r.value = (run.report.final_x - ref.report.final_x).norm();
    r.sign_ok = run.inexact.sign_ok && ref.inexact.sign_ok;
    r.grad_ratio = std::max(run.inexact.ratio, ref.inexact.ratio);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunRecord> run_convergence(const ExperimentConfig& cfg) {
  const Setup s = make_setup(cfg);
  const auto& qs = cfg.q_exponents;
  const auto& ks = cfg.delta_exponents;

  std::vector<std::optional<PipelineReport>> refs(qs.size());
  if (cfg.problem == ProblemKind::Inpainting) {
    auto solved = parallel_map<PipelineReport>(qs.size(), cfg.jobs, [&](std::size_t i) {
      return reference_solve(cfg, s, qs[i], std::nullopt);
    });
    for (std::size_t i = 0; i < qs.size(); ++i) refs[i] = std::move(solved[i]);
  }

  const std::size_t cells = qs.size() * ks.size();
  const auto runs = parallel_map<PipelineReport>(cells, cfg.jobs, [&](std::size_t c) {
    const int k = ks[c % ks.size()];
    const Scalar delta = delta_of(k);
    const Scalar alpha = std::pow(delta, qs[c / ks.size()]);
    const Vector y = make_noisy_data(s.y_true, delta, noise_seed(cfg.seed, k));
    return solve_pipeline(make_problem(s, alpha, y), cfg, std::nullopt,
                          cell_context(cfg, "convergence", alpha, delta));
  });

  std::vector<RunRecord> out;
  for (std::size_t c = 0; c < cells; ++c) {
    const std::size_t qi = c / ks.size();
    const PipelineReport& run = runs[c];
    const Vector& x = run.report.final_x;
    const Vector& x_plus = refs[qi] ? refs[qi]->report.final_x : s.x_true;

    RunRecord r;
    r.study = "convergence";
    r.problem = cfg.problem;
    r.delta = delta_of(ks[c % ks.size()]);
    r.alpha = std::pow(r.delta, qs[qi]);
    r.q = qs[qi];

    r.metric = "residual";
    r.value = (s.op.apply(x) - s.y_true).norm();
    r.sign_ok = run.inexact.sign_ok;
    r.grad_ratio = run.inexact.ratio;
    out.push_back(r);

    r.metric = "error";
    r.value = (x - x_plus).norm();
    if (refs[qi]) {
      r.sign_ok = r.sign_ok && refs[qi]->inexact.sign_ok;
      r.grad_ratio = std::max(r.grad_ratio, refs[qi]->inexact.ratio);
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

NormalityResult normality_from(const Setup& s, PipelineReport pipeline) {
  NormalityResult out;
  out.x_plus = pipeline.report.final_x;
  out.kernel = s.op.kernel_indices();
  out.values = normality_check(*s.reg, out.x_plus, s.op.kernel_basis());
  out.grad_norm = s.reg->rel_subgradient(out.x_plus).norm();
  out.pipeline = std::move(pipeline);
  return out;
}

void require_inpainting(const ExperimentConfig& cfg, const char* study) {
  if (cfg.problem != ProblemKind::Inpainting) {
    throw ConfigError("problem", std::string(study) + " requires the inpainting problem");
  }
}

}  // namespace

NormalityResult run_normality(const ExperimentConfig& cfg) {
  require_inpainting(cfg, "normality");
  const Setup s = make_setup(cfg);
  return normality_from(s, reference_solve(cfg, s, cfg.q_exponents.front(), std::nullopt));
}

NormalityResult run_kernel_initialization(const ExperimentConfig& cfg, Scalar kernel_value) {
  require_inpainting(cfg, "kernel initialization");
  if (!std::isfinite(kernel_value)) throw InvalidArgument("kernel initialization: non-finite value");
  const Setup s = make_setup(cfg);
  Vector x0 = Vector::Zero(cfg.n);
  for (Index i : s.op.kernel_indices()) x0(i) = kernel_value;
  return normality_from(s, reference_solve(cfg, s, cfg.q_exponents.front(), x0));
}

std::vector<RunRecord> normality_records(const ExperimentConfig& cfg, const NormalityResult& r) {
  std::vector<RunRecord> out;
  const Scalar q = cfg.q_exponents.front();
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    RunRecord rec;
    rec.study = "normality";
    rec.problem = cfg.problem;
    rec.delta = cfg.reference_delta;
    rec.alpha = std::pow(cfg.reference_delta, q);
    rec.q = q;
    rec.metric = "kernel_inner[" + std::to_string(r.kernel[i]) + "]";
    rec.value = r.values[i];
    rec.sign_ok = r.pipeline.inexact.sign_ok;
    rec.grad_ratio = r.pipeline.inexact.ratio;
    out.push_back(std::move(rec));
  }
  return out;
}

// ---- output ----------------------------------------------------------------

namespace {

std::string sci(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "study,problem,alpha,delta,q,metric,value,sign_ok,grad_ratio\n";
  for (const RunRecord& r : records) {
    out << r.study << ',' << to_string(r.problem) << ',' << sci(r.alpha) << ',' << sci(r.delta)
        << ',' << (r.q ? sci(*r.q) : std::string()) << ',' << r.metric << ',' << sci(r.value)
        << ',' << (r.sign_ok ? "true" : "false") << ',' << sci(r.grad_ratio) << '\n';
  }
}

std::string to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

std::string to_svg(const std::vector<RunRecord>& records, const std::string& title) {
  constexpr double width = 640.0;
  constexpr double height = 420.0;
  constexpr double left = 80.0;
  constexpr double right = 150.0;
  constexpr double top = 40.0;
  constexpr double bottom = 60.0;
  static const char* const palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  // Series in first-appearance order.
  std::vector<std::string> keys;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> metrics;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const RunRecord& r : records) {
    if (!(r.delta > 0.0) || !(r.value > 0.0)) continue;
    char label[96];
    if (r.q) {
      std::snprintf(label, sizeof label, "q=%g %s", *r.q, r.metric.c_str());
    } else {
      std::snprintf(label, sizeof label, "alpha=%g", r.alpha);
    }
    if (!series.count(label)) keys.emplace_back(label);
    if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) {
      metrics.push_back(r.metric);
    }
    const double lx = std::log10(r.delta);
    const double ly = std::log10(r.value);
    series[label].emplace_back(lx, ly);
    xmin = std::min(xmin, lx);
    xmax = std::max(xmax, lx);
    ymin = std::min(ymin, ly);
    ymax = std::max(ymax, ly);
  }
  if (keys.empty()) {
    xmin = -1.0, xmax = 0.0, ymin = -1.0, ymax = 0.0;
  }
  xmin = std::floor(xmin), xmax = std::ceil(xmax);
  ymin = std::floor(ymin), ymax = std::ceil(ymax);
  if (xmax == xmin) xmax += 1.0;
  if (ymax == ymin) ymax += 1.0;

  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * ph; };

  std::string y_label;
  for (const auto& m : metrics) y_label += (y_label.empty() ? "" : " / ") + m;
  if (y_label.empty()) y_label = "value";

  std::ostringstream s;
  char buf[256];
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << left + pw / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << title << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                left, top, pw, ph);
  s << buf;
  const int xstep = std::max(1, static_cast<int>((xmax - xmin) / 10.0));
  for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); d += xstep) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">1e%d</text>\n",
                  px(d), top, px(d), top + ph, px(d), top + ph + 15, d);
    s << buf;
  }
  const int ystep = std::max(1, static_cast<int>((ymax - ymin) / 10.0));
  for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); d += ystep) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">1e%d</text>\n",
                  left, py(d), left + pw, py(d), left - 5, py(d) + 4, d);
    s << buf;
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
    << "\" text-anchor=\"middle\">delta</text>\n";
  s << "<text transform=\"translate(20," << top + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";

  for (std::size_t i = 0; i < keys.size(); ++i) {
    const char* color = palette[i % std::size(palette)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [lx, ly] : series[keys[i]]) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(lx), py(ly));
      s << buf;
    }
    s << "\"/>\n";
    const double ly = top + 15.0 + 16.0 * static_cast<double>(i);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-width=\"2\"/><text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                  left + pw + 10, ly, left + pw + 30, ly, color, left + pw + 35, ly + 4,
                  keys[i].c_str());
    s << buf;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace critreg
