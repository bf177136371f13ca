#include <benchmark/benchmark.h>

#include <memory>

#include "fdlab/evolve.hpp"
#include "fdlab/grid.hpp"
#include "fdlab/inequalities.hpp"
#include "fdlab/kernels.hpp"
#include "fdlab/stationary.hpp"

namespace {

fdlab::ModelParams drift_params(int dim, double lambda, double q) {
  fdlab::ModelParams p;
  p.dim = dim;
  p.lambda = lambda;
  p.q = q;
  p.variant = fdlab::Variant::Drift;
  return fdlab::validate_params(p);
}

void BM_KernelAssembly(benchmark::State& state) {
  const auto grid = std::make_shared<fdlab::RadialGrid>(
      fdlab::build_grid(2, 10.0, static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdlab::assemble_kernel(grid, 3.0, 32));
  }
}
BENCHMARK(BM_KernelAssembly)->Arg(64)->Arg(128)->Arg(256);

void BM_DriftStep(benchmark::State& state) {
  const auto p = drift_params(1, 2.0, 0.7);
  const auto grid = std::make_shared<fdlab::RadialGrid>(
      fdlab::build_grid(1, 40.0, static_cast<std::size_t>(state.range(0))));
  const auto s = fdlab::solve_h_star(p, grid);
  const double dt = 0.5 * fdlab::stable_dt(s.profile, p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdlab::step(s.profile, p, nullptr, dt));
  }
}
BENCHMARK(BM_DriftStep)->Arg(512)->Arg(2048);

void BM_MeanFieldStep(benchmark::State& state) {
  fdlab::ModelParams p;
  p.dim = 1;
  p.lambda = 2.0;
  p.q = 0.7;
  p.variant = fdlab::Variant::MeanField;
  p = fdlab::validate_params(p);
  const auto grid = std::make_shared<fdlab::RadialGrid>(
      fdlab::build_grid(1, 50.0, static_cast<std::size_t>(state.range(0))));
  const auto K = fdlab::assemble_kernel(grid, p.lambda, 64);
  const auto s = fdlab::meanfield_lambda2(p, grid);
  const double dt = 0.5 * fdlab::stable_dt(s.profile, p, &K);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdlab::step(s.profile, p, &K, dt));
  }
}
BENCHMARK(BM_MeanFieldStep)->Arg(256)->Arg(512);

void BM_HpEstimate(benchmark::State& state) {
  const auto p = drift_params(3, 2.0, 0.8);
  const auto grid = std::make_shared<fdlab::RadialGrid>(
      fdlab::build_grid(3, 40.0, static_cast<std::size_t>(state.range(0))));
  const auto s = fdlab::solve_h_star(p, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdlab::hp_estimate(s));
  }
}
BENCHMARK(BM_HpEstimate)->Arg(512)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
