#include <benchmark/benchmark.h>

#include <cmath>

#include "korteweg/diagnostics.hpp"

namespace {

using namespace korteweg;

ModelParams bench_params() {
  ModelParams p;
  p.gamma = 2.0;
  p.s = -1.0;
  p.epsilon = 0.5;
  p.nu = 0.1;
  return p;
}

EulerState euler_fixture(int n, const ModelParams& p) {
  const GridPtr g = make_grid(n, 2.0 * Grid::pi());
  const Field rho = Field::sample(g, [](double x) { return 1.0 + 0.1 * std::sin(x); });
  const Field u = Field::sample(g, [](double x) { return 0.05 * std::cos(x); });
  return EulerState{rho, u, drift_velocity(rho, p)};
}

void bm_deriv(benchmark::State& state) {
  const GridPtr g = make_grid(static_cast<int>(state.range(0)), 2.0 * Grid::pi());
  const Field f = Field::sample(g, [](double x) { return std::exp(std::sin(x)); });
  for (auto _ : state) {
    benchmark::DoNotOptimize(deriv(f, 1));
  }
}
BENCHMARK(bm_deriv)->Arg(256)->Arg(1024)->Arg(4096);

void bm_rhs_euler_korteweg(benchmark::State& state) {
  const ModelParams p = bench_params();
  const EulerState st = euler_fixture(static_cast<int>(state.range(0)), p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs_euler_korteweg(st, p));
  }
}
BENCHMARK(bm_rhs_euler_korteweg)->Arg(256)->Arg(1024)->Arg(4096);

void bm_rhs_nsk(benchmark::State& state) {
  const ModelParams p = bench_params();
  const EulerState base = euler_fixture(static_cast<int>(state.range(0)), p);
  const double root = std::sqrt(p.epsilon * p.epsilon - p.nu * p.nu);
  const NskState st{base.rho, base.u + p.nu * base.v, root * base.v};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs_nsk(st, p));
  }
}
BENCHMARK(bm_rhs_nsk)->Arg(256)->Arg(1024)->Arg(4096);

void bm_energy_euk(benchmark::State& state) {
  const ModelParams p = bench_params();
  const EulerState st = euler_fixture(static_cast<int>(state.range(0)), p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_euk(st, p));
  }
}
BENCHMARK(bm_energy_euk)->Arg(256)->Arg(1024)->Arg(4096);

void bm_rk4_step(benchmark::State& state) {
  const ModelParams p = bench_params();
  const EulerState base = euler_fixture(static_cast<int>(state.range(0)), p);
  const State st = make_euler_state(base.rho, base.u, base.v);
  TimeControls c;
  const double dt = 0.5 * stable_dt(st, p, c);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rk4_step(st, dt, p, c));
  }
}
BENCHMARK(bm_rk4_step)->Arg(256)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
