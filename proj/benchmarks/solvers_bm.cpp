#include <benchmark/benchmark.h>

#include "fitsink/core_model.hpp"
#include "fitsink/fc_solver.hpp"
#include "fitsink/sk_solver.hpp"

using namespace fitsink;

namespace {

BipartiteMatrix nested(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  return generate_nested(n, n * 3 / 2, 0.2, 7);
}

}  // namespace

static void BM_FcSolveJacobi(benchmark::State& state) {
  const auto m = nested(state);
  FCOptions options;
  options.max_iterations = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(fc_solve(m, options));
}
BENCHMARK(BM_FcSolveJacobi)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

static void BM_FcSolveGaussSeidel(benchmark::State& state) {
  const auto m = nested(state);
  FCOptions options;
  options.schedule = Schedule::gauss_seidel;
  options.max_iterations = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(fc_solve(m, options));
}
BENCHMARK(BM_FcSolveGaussSeidel)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

static void BM_SkSolve(benchmark::State& state) {
  const auto problem = ScalingProblem::from_bipartite(nested(state));
  SKOptions options;
  options.log_domain = state.range(1) != 0;
  options.max_iterations = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(sk_solve(problem, options));
}
BENCHMARK(BM_SkSolve)
    ->ArgsProduct({{16, 64, 256}, {0, 1}})
    ->ArgNames({"n", "log"})
    ->Unit(benchmark::kMillisecond);

static void BM_Validate(benchmark::State& state) {
  const auto m = nested(state);
  for (auto _ : state) benchmark::DoNotOptimize(validate(m));
}
BENCHMARK(BM_Validate)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
