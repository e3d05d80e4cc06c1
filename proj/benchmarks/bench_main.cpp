#include <benchmark/benchmark.h>

#include "radcav/cavity_solver.hpp"
#include "radcav/inner_limit.hpp"
#include "radcav/ode_engine.hpp"
#include "radcav/stored_energy.hpp"

namespace {

using namespace radcav;

const StoredEnergy& reference_energy() {
  static const StoredEnergy E(ScalarModel::quadratic(0.5), ScalarModel::log_entropy(1.0), 3);
  return E;
}

void bm_eval_derivatives(benchmark::State& state) {
  const StoredEnergy& E = reference_energy();
  RadialState st{0.7, 1.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(E.eval_derivatives(st));
    st.a += 1e-12;
  }
}
BENCHMARK(bm_eval_derivatives);

void bm_eval_P(benchmark::State& state) {
  const StoredEnergy& E = reference_energy();
  RadialState st{0.7, 1.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(E.eval_P(st));
    st.a += 1e-12;
  }
}
BENCHMARK(bm_eval_P);

void bm_cavity_rhs(benchmark::State& state) {
  const StoredEnergy& E = reference_energy();
  const int d = E.dim();
  double y[3] = {0.6, 1.4, 1.1};
  double dy[3];
  double s = 0.8;
  for (auto _ : state) {
    const RadialState st{y[0], y[1]};
    const double P = E.eval_P(st);
    const double Q = E.eval_Q(st, s);
    dy[0] = -((d - 1) / s) * (y[0] - y[1]) * P / Q;
    dy[1] = (y[0] - y[1]) / s;
    dy[2] = y[0];
    benchmark::DoNotOptimize(dy);
    s += 1e-12;
  }
}
BENCHMARK(bm_cavity_rhs);

void bm_solve_cavity(benchmark::State& state) {
  CavityConfig cfg;
  cfg.E = &reference_energy();
  cfg.phi0 = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_cavity(cfg));
}
BENCHMARK(bm_solve_cavity)->Unit(benchmark::kMillisecond);

void bm_solve_inner(benchmark::State& state) {
  const StoredEnergy& E = reference_energy();
  const double v0 = E.natural_stretch();
  for (auto _ : state) benchmark::DoNotOptimize(solve_inner(E, v0, 1e4));
}
BENCHMARK(bm_solve_inner)->Unit(benchmark::kMillisecond);

void bm_refine_root(benchmark::State& state) {
  auto f = [](double x) { return x * x * x - 2.0; };
  for (auto _ : state) benchmark::DoNotOptimize(refine_root(f, 0.5, 2.0));
}
BENCHMARK(bm_refine_root);

}  // namespace

BENCHMARK_MAIN();
