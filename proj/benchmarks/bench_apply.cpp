// Sketch application throughput across graph sizes at fixed (d, k). The
// product should scale linearly in N since nnz = 2N * nnz(C0).

#include <benchmark/benchmark.h>

#include <random>

#include "expsketch/graphs.hpp"
#include "expsketch/inner_code.hpp"
#include "expsketch/tanner.hpp"

using namespace expsketch;

namespace {

InnerCode bench_code() {
  // fixed certified code found by search_inner_code(8, 0.25, 0.3, 3, 8, ...)
  InnerCode code;
  code.k = 6;
  code.d = 8;
  code.delta0 = 0.25;
  code.rho0 = 0.3;
  code.tau0 = 2.0;
  code.column_weight = 3;
  code.matrix = BinaryMatrix(6, 8);
  const int ones[8][3] = {{0, 1, 2}, {3, 4, 5}, {0, 3, 1}, {2, 4, 0},
                          {5, 1, 3}, {2, 5, 4}, {0, 4, 5}, {1, 2, 3}};
  for (int c = 0; c < 8; ++c)
    for (int j = 0; j < 3; ++j) code.matrix.set(ones[c][j], c, 1);
  return code;
}

TannerMatrix build_instance(int n_vertices) {
  RegularGraph g = random_regular(n_vertices, 8, 12345);
  return assemble(double_cover(g), bench_code());
}

void BM_apply(benchmark::State& state) {
  TannerMatrix t = build_instance(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec x(t.matrix.cols);
  for (double& v : x) v = gauss(rng);
  for (auto _ : state) {
    Vec y = t.matrix.apply(x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(t.matrix.nnz()));
}
BENCHMARK(BM_apply)->Arg(2000)->Arg(4000)->Arg(8000)->Arg(16000)->Arg(32000);

void BM_apply_parallel(benchmark::State& state) {
  TannerMatrix t = build_instance(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec x(t.matrix.cols);
  for (double& v : x) v = gauss(rng);
  for (auto _ : state) {
    Vec y = t.matrix.apply_parallel(x, 4);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(t.matrix.nnz()));
}
BENCHMARK(BM_apply_parallel)->Arg(8000)->Arg(32000);

}  // namespace

BENCHMARK_MAIN();
