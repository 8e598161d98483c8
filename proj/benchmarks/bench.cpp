// Microbenchmarks for the hot paths: special-function evaluation, kernel
// entries, grid construction, matrix assembly, and the dense eigensolve.
#include "bravl/channel.hpp"
#include "bravl/kinematics.hpp"
#include "bravl/legendre.hpp"
#include "bravl/spectral.hpp"

#include <benchmark/benchmark.h>

namespace {

bravl::PhysicalParams natural_units() {
  bravl::PhysicalParams params;
  params.alpha = 1.0;
  params.Z = 0.5;
  return params;
}

void BM_legendre_q(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  double t = 1.0 + 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bravl::legendre_q(l, t));
    t = (t < 50.0) ? t * 1.37 : 1.0 + 1e-6; // sweep both evaluation regimes
  }
}
BENCHMARK(BM_legendre_q)->Arg(0)->Arg(2)->Arg(6);

void BM_kernel_entry(benchmark::State& state) {
  const bravl::PhysicalParams params = natural_units();
  const bravl::Channel ch{0, +1};
  double p = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bravl::kernel_k1(ch.l, p, 1.0, params));
    benchmark::DoNotOptimize(bravl::kernel_k2(ch, p, 1.0, params));
    p = (p < 40.0) ? p * 1.618 : 0.1;
  }
}
BENCHMARK(BM_kernel_entry);

void BM_diagonal_average(benchmark::State& state) {
  const bravl::PhysicalParams params = natural_units();
  const bravl::Channel ch{0, +1};
  const bravl::MomentumGrid grid = bravl::build_grid(100);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bravl::diagonal_kernel(ch, i, grid, params));
    i = (i + 7) % grid.size();
  }
}
BENCHMARK(BM_diagonal_average);

void BM_build_grid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bravl::build_grid(n));
  }
}
BENCHMARK(BM_build_grid)->Arg(100)->Arg(400);

void BM_assemble(benchmark::State& state) {
  const bravl::PhysicalParams params = natural_units();
  const bravl::Channel ch{0, +1};
  const bravl::MomentumGrid grid =
      bravl::build_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bravl::assemble(ch, grid, params));
  }
}
BENCHMARK(BM_assemble)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_eigendecompose(benchmark::State& state) {
  const bravl::PhysicalParams params = natural_units();
  const bravl::ChannelMatrix cm = bravl::assemble(
      bravl::Channel{0, +1},
      bravl::build_grid(static_cast<int>(state.range(0))), params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bravl::eigendecompose(cm));
  }
}
BENCHMARK(BM_eigendecompose)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
