#include <benchmark/benchmark.h>

#include "epipanel/regression.hpp"
#include "epipanel/rng.hpp"

using namespace epipanel;

namespace {

// Two-factor design (unit + state-week) of the shape the case regressions
// produce: range(0) units, 180 days, 9 regressors.
DesignMatrix make_design(int n_units) {
  const int n_days = 180;
  const int n_states = std::max(2, n_units / 6);
  const long n = static_cast<long>(n_units) * n_days;
  DesignMatrix design;
  design.n_units = n_units;
  design.n_days = n_days;
  design.y.resize(n);
  design.X.resize(n, 9);
  Rng rng(7);
  std::vector<std::int32_t> unit_codes(n), sw_codes(n);
  for (int u = 0; u < n_units; ++u) {
    for (int d = 0; d < n_days; ++d) {
      const long r = static_cast<long>(u) * n_days + d;
      design.y[r] = rng.normal();
      for (int c = 0; c < 9; ++c) design.X(r, c) = rng.normal();
      unit_codes[r] = u;
      sw_codes[r] = (u % n_states) * ((n_days + 6) / 7) + d / 7;
      design.row_unit.push_back(u);
      design.row_day.push_back(d);
    }
  }
  design.factor_codes = {unit_codes, sw_codes};
  design.factor_levels = {n_units, n_states * ((n_days + 6) / 7)};
  design.factor_names = {"unit", "state_x_week"};
  design.unit_factor = 0;
  design.cluster_codes.assign(n, 0);
  for (long r = 0; r < n; ++r) design.cluster_codes[r] = unit_codes[r] % n_states;
  design.n_clusters = n_states;
  for (int c = 0; c < 9; ++c) design.term_names.push_back("x" + std::to_string(c));
  return design;
}

}  // namespace

static void DemeanTwoFactor(benchmark::State& state) {
  const auto pristine = make_design(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    DesignMatrix design = pristine;
    auto result = demean(design, 1e-8, 10000);
    benchmark::DoNotOptimize(result.iterations);
  }
  state.SetItemsProcessed(state.iterations() * pristine.n_rows());
}
BENCHMARK(DemeanTwoFactor)->Arg(60)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

static void FullFitTwoFactor(benchmark::State& state) {
  const auto pristine = make_design(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto fit = fit_design(pristine, FitOptions{});
    benchmark::DoNotOptimize(fit.coefficients);
  }
  state.SetItemsProcessed(state.iterations() * pristine.n_rows());
}
BENCHMARK(FullFitTwoFactor)->Arg(60)->Arg(300)->Unit(benchmark::kMillisecond);
