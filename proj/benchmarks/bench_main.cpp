#include "degensink/degensink.hpp"

#include <benchmark/benchmark.h>

namespace ds = degensink;

namespace {

ds::Instance staircase(int n, int blocks) {
  ds::InstanceSpec s;
  s.kind = ds::InstanceKind::StaircaseBlocks;
  s.n_rows = s.n_cols = n;
  s.n_blocks = blocks;
  return ds::gen_instance(s);
}

void BM_SinkhornStaircase(benchmark::State& state) {
  const auto inst = staircase(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  ds::StopConfig cfg;
  cfg.max_iter = 2000;
  long iters = 0;
  for (auto _ : state) {
    const auto rep = ds::run_sinkhorn(inst.R, inst.mu, inst.nu, cfg);
    iters = rep.iterations;
    benchmark::DoNotOptimize(rep.r_star.data());
  }
  state.counters["sweeps"] = static_cast<double>(iters);
}
BENCHMARK(BM_SinkhornStaircase)->Args({50, 1})->Args({50, 4})->Args({100, 4});

void BM_MaskedSolve(benchmark::State& state) {
  const auto inst = staircase(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    const auto res = ds::masked_solve(inst.R, inst.mu, inst.nu, *inst.expected_support);
    benchmark::DoNotOptimize(res.report.p_star.data());
  }
}
BENCHMARK(BM_MaskedSolve)->Args({50, 4})->Args({100, 4});

void BM_Algorithm1(benchmark::State& state) {
  const auto inst = staircase(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    const auto res = ds::approx_support_algorithm1(inst.R, inst.mu, inst.nu);
    benchmark::DoNotOptimize(res.iterations);
  }
}
BENCHMARK(BM_Algorithm1)->Args({50, 4})->Args({100, 8});

void BM_ClassifyExact(benchmark::State& state) {
  ds::InstanceSpec s;
  s.kind = ds::InstanceKind::RandomSparse;
  s.n_rows = s.n_cols = static_cast<int>(state.range(0));
  s.density = 0.4;
  s.seed = 11;
  const auto inst = ds::gen_instance(s);
  for (auto _ : state) benchmark::DoNotOptimize(ds::classify_exact(inst.R, inst.mu, inst.nu).tag);
}
BENCHMARK(BM_ClassifyExact)->Arg(8)->Arg(14)->Arg(18);

void BM_FeasibilityFlow(benchmark::State& state) {
  ds::InstanceSpec s;
  s.kind = ds::InstanceKind::RandomSparse;
  s.n_rows = s.n_cols = static_cast<int>(state.range(0));
  s.density = 0.2;
  s.seed = 5;
  const auto inst = ds::gen_instance(s);
  for (auto _ : state) benchmark::DoNotOptimize(ds::feasibility_flow(inst.R, inst.mu, inst.nu));
}
BENCHMARK(BM_FeasibilityFlow)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
