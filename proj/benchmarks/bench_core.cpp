#include <benchmark/benchmark.h>

#include <random>

#include "nmfpool/graph.hpp"
#include "nmfpool/layers.hpp"
#include "nmfpool/nmf.hpp"

using namespace nmfpool;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed,
                          double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  DenseMatrix m(r, c);
  for (double& v : m.values()) v = unif(rng);
  return m;
}

DenseMatrix random_adjacency(int n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DenseMatrix a((std::size_t)n, (std::size_t)n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (unif(rng) < p) a((std::size_t)i, (std::size_t)j) = a((std::size_t)j, (std::size_t)i) = 1.0;
    }
  }
  return a;
}

void BM_Matmul(benchmark::State& state) {
  const std::size_t n = (std::size_t)state.range(0);
  const DenseMatrix a = random_matrix(n, n, 1);
  const DenseMatrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matmul(a, b));
  }
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128)->Arg(300);

void BM_NmfFactorize(benchmark::State& state) {
  const int n = (int)state.range(0);
  const DenseMatrix a = random_adjacency(n, 0.1, 3);
  NmfConfig cfg;
  cfg.k = 8;
  cfg.seed = 4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(factorize(a, cfg));
  }
}
BENCHMARK(BM_NmfFactorize)->Arg(33)->Arg(100)->Arg(284);

void BM_GcForward(benchmark::State& state) {
  const int n = (int)state.range(0);
  const DenseMatrix a = normalize_adjacency(random_adjacency(n, 0.1, 5));
  const DenseMatrix z = random_matrix((std::size_t)n, 64, 6, -1.0, 1.0);
  GcParams p{random_matrix(64, 64, 7, -0.1, 0.1), DenseMatrix(64, 64)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gc_forward(a, z, p));
  }
}
BENCHMARK(BM_GcForward)->Arg(33)->Arg(100)->Arg(284);

void BM_NmfPoolForward(benchmark::State& state) {
  const int n = (int)state.range(0);
  const DenseMatrix a = normalize_adjacency(random_adjacency(n, 0.1, 8));
  const DenseMatrix z = random_matrix((std::size_t)n, 64, 9);
  NmfConfig cfg;
  cfg.seed = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nmfpool_forward(a, z, 8, cfg));
  }
}
BENCHMARK(BM_NmfPoolForward)->Arg(33)->Arg(100);

void BM_ScaledLaplacian(benchmark::State& state) {
  const int n = (int)state.range(0);
  const DenseMatrix a = random_adjacency(n, 0.1, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scaled_laplacian(a));
  }
}
BENCHMARK(BM_ScaledLaplacian)->Arg(33)->Arg(100)->Arg(284);

}  // namespace

BENCHMARK_MAIN();
