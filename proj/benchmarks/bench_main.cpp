#include "critreg/experiments.hpp"
#include "critreg/network.hpp"
#include "critreg/random.hpp"

#include <benchmark/benchmark.h>

using namespace critreg;

namespace {

void BM_CumSumAdjoint(benchmark::State& state) {
  const Index n = state.range(0);
  const auto op = LinearOperator::cumulative_sum(n);
  Rng rng(1);
  const Vector x = rng.normal_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(op.adjoint_apply(op.apply(x)));
  state.SetComplexityN(n);
}
BENCHMARK(BM_CumSumAdjoint)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_TikhonovGradient(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::CumSum;
  cfg.n = state.range(0);
  const auto setup = make_setup(cfg);
  const TikhonovProblem p(NormDiscrepancy(setup.op), setup.reg, 1e-3, setup.y_true);
  const Vector x = setup.x_true;
  for (auto _ : state) benchmark::DoNotOptimize(p.gradient(x));
}
BENCHMARK(BM_TikhonovGradient)->Arg(128)->Arg(512);

void BM_NewtonFromTruth(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.problem = state.range(1) == 0 ? ProblemKind::Inpainting : ProblemKind::CumSum;
  cfg.n = state.range(0);
  const auto setup = make_setup(cfg);
  const TikhonovProblem p(NormDiscrepancy(setup.op), setup.reg, 1e-3, setup.y_true);
  for (auto _ : state) benchmark::DoNotOptimize(newton(p, setup.x_true).final_x);
}
BENCHMARK(BM_NewtonFromTruth)
    ->Args({128, 0})
    ->Args({512, 0})
    ->Args({128, 1})
    ->Args({512, 1})
    ->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.problem = state.range(0) == 0 ? ProblemKind::Inpainting : ProblemKind::CumSum;
  const auto setup = make_setup(cfg);
  const TikhonovProblem p(NormDiscrepancy(setup.op), setup.reg, 1e-3, setup.y_true);
  for (auto _ : state) benchmark::DoNotOptimize(solve_pipeline(p, cfg).report.final_x);
}
BENCHMARK(BM_Pipeline)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_NetworkSubgradient(benchmark::State& state) {
  const Index w = state.range(0);
  const NetworkRegularizer reg(QuasiHomNetwork::random({w, w, w, w}, 3));
  Rng rng(2);
  const Vector x = rng.normal_vector(w);
  for (auto _ : state) benchmark::DoNotOptimize(reg.rel_subgradient(x));
}
BENCHMARK(BM_NetworkSubgradient)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
