#include <benchmark/benchmark.h>

#include "epipanel/sird.hpp"
#include "epipanel/synth.hpp"

using namespace epipanel;

static void IntegrateSird(benchmark::State& state) {
  SirdParams params;
  params.population = 1e6;
  params.beta = constant_rate(0.2);
  params.gamma = 0.1;
  params.kappa = 0.02;
  params.tau = constant_rate(0.25);
  const SirdState init{params.population - 100.0, 100.0, 0, 0, 0};
  const double dt = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto trajectory = integrate(params, init, 180.0, dt);
    benchmark::DoNotOptimize(trajectory.path.back().confirmed);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(180 / dt));
}
BENCHMARK(IntegrateSird)->Arg(10)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void GenerateSynthPanel(benchmark::State& state) {
  SynthPanelConfig config;
  config.n_units = static_cast<int>(state.range(0));
  config.n_days = 180;
  for (auto _ : state) {
    auto result = generate_synth_panel(config, 42);
    benchmark::DoNotOptimize(result.panel.n_rows());
  }
}
BENCHMARK(GenerateSynthPanel)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);
