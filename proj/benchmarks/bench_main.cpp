#include <benchmark/benchmark.h>

#include "sbdf/engine.hpp"
#include "sbdf/models.hpp"
#include "sbdf/parallel.hpp"

namespace {

sbdf::GridSpec mixed(int n) {
  using sbdf::Boundary;
  return {n, n, 1.0 / (n - 1), {Boundary::DirichletZero, Boundary::NeumannZero, Boundary::NeumannZero, Boundary::NeumannZero}};
}

void BM_Laplacian(benchmark::State& state) {
  const sbdf::Field u = sbdf::ac_initial(mixed(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(sbdf::apply_laplacian(u));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(u.size()));
}
BENCHMARK(BM_Laplacian)->Arg(128)->Arg(256)->Arg(512);

void BM_FpiSweep(benchmark::State& state) {
  const int k = static_cast<int>(state.range(1));
  const sbdf::GridSpec g = mixed(static_cast<int>(state.range(0)));
  const sbdf::NonlinearModel m = sbdf::allen_cahn(0.01);
  const sbdf::History h = sbdf::bootstrap(m, sbdf::ac_initial(g), k, 0.01, {});
  const auto c = sbdf::scheme_coeffs(k);
  const sbdf::Field H = sbdf::history_term(c, h, m.B);
  for (auto _ : state) benchmark::DoNotOptimize(sbdf::fpi_update(c, H, h.dt, h.levels.front(), m));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(H.size()));
}
BENCHMARK(BM_FpiSweep)->Args({128, 1})->Args({128, 4})->Args({512, 2});

void BM_Step(benchmark::State& state) {
  const int k = static_cast<int>(state.range(1));
  const sbdf::NonlinearModel m = sbdf::allen_cahn(0.01);
  sbdf::Integrator it(m, sbdf::ac_initial(mixed(static_cast<int>(state.range(0)))), k, 0.01, {});
  long iters = 0;
  for (auto _ : state) iters += it.advance().report.iters;
  state.counters["fpi_iters_per_step"] = benchmark::Counter(static_cast<double>(iters), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Step)->Args({128, 1})->Args({128, 2})->Args({128, 4})->Args({256, 2})->Unit(benchmark::kMillisecond);

void BM_StepThreads(benchmark::State& state) {
  sbdf::set_thread_count(static_cast<int>(state.range(0)));
  sbdf::Integrator it(sbdf::allen_cahn(0.01), sbdf::ac_initial(mixed(512)), 2, 0.01, {});
  for (auto _ : state) it.advance();
  sbdf::set_thread_count(1);
}
BENCHMARK(BM_StepThreads)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
