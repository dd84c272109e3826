#include <benchmark/benchmark.h>

#include <cmath>

#include "growthlab/minimize.hpp"

namespace {

using namespace growthlab;

FunctionOracle power_oracle(Eigen::Index dim, double p) {
  return FunctionOracle("|x|^p", dim, [p](const Point& x) { return ExtendedReal(std::pow(x.norm(), p)); });
}

void BM_ArgminBall1D(benchmark::State& state) {
  const FunctionOracle f = power_oracle(1, 3.0);
  const BallRegion ball(Point{0.0}, 10.0);
  SolverConfig cfg;
  cfg.grid_points_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(argmin_tilted(f, TiltForm{0.7}, ball, cfg));
}
BENCHMARK(BM_ArgminBall1D)->Arg(201)->Arg(2001)->Arg(20001)->Unit(benchmark::kMicrosecond);

void BM_ArgminBall2D(benchmark::State& state) {
  const FunctionOracle f = power_oracle(2, 2.0);
  const BallRegion ball(Point{0.0, 0.0}, 1.0);
  SolverConfig cfg = SolverConfig::defaults_for_dimension(2);
  cfg.grid_points_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(argmin_tilted(f, TiltForm{0.3, -0.4}, ball, cfg));
}
BENCHMARK(BM_ArgminBall2D)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
