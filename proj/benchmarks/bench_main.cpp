#include <benchmark/benchmark.h>

#include "wfpl/entropy.hpp"
#include "wfpl/kernel.hpp"
#include "wfpl/nonlocal_op.hpp"
#include "wfpl/solver.hpp"

namespace {

// Golden configurations: (2, 0.4, 0.05), (1.5, 0.4, 0.1), (3, 0.25, 0.05).
wfpl::ProblemSpec golden(double p) {
  wfpl::ProblemSpec s;
  s.p = p;
  s.s = p > 2.0 ? 0.25 : 0.4;
  s.beta = p < 2.0 ? 0.1 : 0.05;
  return s;
}

void BM_AssembleKernel(benchmark::State& state) {
  const auto grid = wfpl::make_grid(golden(2.0), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wfpl::assemble_kernel(grid));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleKernel)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Energy(benchmark::State& state) {
  const auto grid = wfpl::make_grid(golden(1.5), static_cast<std::size_t>(state.range(0)));
  const auto K = wfpl::assemble_kernel(grid);
  const auto u = wfpl::DiscreteFunction::sample(grid, [](double x) { return 1.0 - x * x; });
  for (auto _ : state) benchmark::DoNotOptimize(wfpl::energy_seminorm(u, K, 1.5));
}
BENCHMARK(BM_Energy)->RangeMultiplier(2)->Range(32, 512);

void BM_SolveSpike(benchmark::State& state) {
  const double p = static_cast<double>(state.range(1)) / 2.0;
  const auto grid = wfpl::make_grid(golden(p), static_cast<std::size_t>(state.range(0)));
  const auto K = wfpl::assemble_kernel(grid);
  const auto f = wfpl::spike_data(grid);
  for (auto _ : state) benchmark::DoNotOptimize(wfpl::solve_dirichlet(f, K));
}
BENCHMARK(BM_SolveSpike)->ArgsProduct({{64, 128}, {3, 4, 6}})->Unit(benchmark::kMillisecond);

void BM_FirstEigenvalue(benchmark::State& state) {
  const auto grid = wfpl::make_grid(golden(2.0), static_cast<std::size_t>(state.range(0)));
  const auto K = wfpl::assemble_kernel(grid);
  for (auto _ : state) benchmark::DoNotOptimize(wfpl::first_eigenvalue(K));
}
BENCHMARK(BM_FirstEigenvalue)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
