#include <benchmark/benchmark.h>

#include "growthlab/tracking.hpp"

namespace {

using namespace growthlab::tracking;

void BM_SolveState(benchmark::State& state) {
  const Grid2D grid(static_cast<int>(state.range(0)));
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(grid.size(), 8.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_state_detailed(u, grid));
}
BENCHMARK(BM_SolveState)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Adjoint(benchmark::State& state) {
  const Grid2D grid(static_cast<int>(state.range(0)));
  const Field2D y = solve_state_detailed(Eigen::VectorXd::Constant(grid.size(), 8.0), grid).state;
  const Field2D y_d = default_target(grid);
  for (auto _ : state) benchmark::DoNotOptimize(solve_adjoint(y, y_d, grid));
}
BENCHMARK(BM_Adjoint)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
