#include <benchmark/benchmark.h>

#include "epipanel/inference.hpp"
#include "epipanel/rng.hpp"

using namespace epipanel;

static void ClusterSandwich(benchmark::State& state) {
  const long n = state.range(0);
  const int k = 9, clusters = 50;
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd e(n);
  std::vector<std::int32_t> codes(n);
  Rng rng(3);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) X(i, j) = rng.normal();
    e[i] = rng.normal();
    codes[i] = static_cast<std::int32_t>(i % clusters);
  }
  for (auto _ : state) {
    auto v = cluster_vcov(X, e, {codes, clusters}, true);
    benchmark::DoNotOptimize(v(0, 0));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(ClusterSandwich)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);
