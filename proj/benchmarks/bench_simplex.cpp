// Basis-pursuit solve cost on assembled matrices of growing size.

#include <benchmark/benchmark.h>

#include <random>

#include "expsketch/graphs.hpp"
#include "expsketch/inner_code.hpp"
#include "expsketch/recovery.hpp"
#include "expsketch/tanner.hpp"

using namespace expsketch;

namespace {

void BM_l1_minimize(benchmark::State& state) {
  const int n_vertices = static_cast<int>(state.range(0));
  RegularGraph g = random_regular(n_vertices, 8, 99);
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
  TannerMatrix t = assemble(double_cover(g), code);
  DenseMatrix dense = t.matrix.to_dense();

  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec x(t.matrix.cols, 0.0);
  x[0] = gauss(rng);
  x[t.matrix.cols / 2] = gauss(rng);
  Vec y = t.matrix.apply(x);
  for (auto _ : state) {
    RecoveryResult r = l1_minimize(dense, y, 0.0);
    benchmark::DoNotOptimize(r.objective);
  }
}
BENCHMARK(BM_l1_minimize)->Arg(10)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
