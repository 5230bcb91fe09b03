// Serial reference vs OpenMP path for the Monte Carlo and trial kernels.

#include <benchmark/benchmark.h>

#include "proxmse/denoise.hpp"
#include "proxmse/lasso.hpp"
#include "proxmse/subdiff.hpp"

using namespace proxmse;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::kSerial : Exec::kParallel; }

McConfig mc(std::size_t samples, Exec exec) {
  McConfig c;
  c.samples = samples;
  c.seed = 1;
  c.exec = exec;
  return c;
}

void BM_MsdLambdaSparse(benchmark::State& state) {
  const auto inst = make_sparse(500, 20, MagnitudeLaw::kUnit, 1);
  const auto cfg = mc(20000, exec_of(state));
  for (auto _ : state) benchmark::DoNotOptimize(msd_lambda(inst.structure, 2.5, cfg).mean);
}

void BM_MsdConeSparse(benchmark::State& state) {
  const auto inst = make_sparse(500, 20, MagnitudeLaw::kUnit, 1);
  const auto cfg = mc(5000, exec_of(state));
  for (auto _ : state) benchmark::DoNotOptimize(msd_cone(inst.structure, cfg).mean);
}

void BM_MsdConeLowRank(benchmark::State& state) {
  const auto inst = make_low_rank(30, 4, 5);
  const auto cfg = mc(500, exec_of(state));
  for (auto _ : state) benchmark::DoNotOptimize(msd_cone(inst.structure, cfg).mean);
}

void BM_DenoiseRegularized(benchmark::State& state) {
  const auto inst = make_sparse(200, 10, MagnitudeLaw::kUniform12, 6);
  const auto grid = default_sigma_grid(inst);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_regularized(inst, 2.0, grid, 200, 7, exec_of(state)).records.back().nmse_mean);
  }
}

void BM_LassoPoint(benchmark::State& state) {
  const auto inst = make_sparse(500, 20, MagnitudeLaw::kUnit, 1);
  LassoExperiment cfg;
  cfg.trials = 8;
  cfg.seed = 12;
  cfg.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_lasso_point(inst, 150, 89.0, cfg).eta_mean);
}

}  // namespace

BENCHMARK(BM_MsdLambdaSparse)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MsdConeSparse)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MsdConeLowRank)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenoiseRegularized)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LassoPoint)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
