#include "lnlm/benchgen.hpp"
#include "lnlm/graph.hpp"
#include "lnlm/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace lnlm;

namespace {

Graph bench_graph(std::size_t n) {
  const std::size_t blocks = std::max<std::size_t>(2, n / 250);
  const double p_in = 6.0 / static_cast<double>(n / blocks);
  return sbm_graph({std::vector<std::size_t>(blocks, n / blocks), p_in, 0.2 / static_cast<double>(n), 3}).first;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

template <bool Parallel>
void BM_Spmm(benchmark::State& state) {
  const Graph g = bench_graph(static_cast<std::size_t>(state.range(0)));
  const Matrix x = random_matrix(static_cast<Eigen::Index>(g.num_nodes()), 200);
  for (auto _ : state) {
    Matrix y = Parallel ? kernels::spmm(g.adjacency(), x) : kernels::serial::spmm(g.adjacency(), x);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_SparseGramTrace(benchmark::State& state) {
  const Graph g = bench_graph(static_cast<std::size_t>(state.range(0)));
  const Matrix z = random_matrix(static_cast<Eigen::Index>(g.num_nodes()), 200);
  for (auto _ : state) {
    double t = Parallel ? kernels::sparse_gram_trace(g.adjacency(), z)
                        : kernels::serial::sparse_gram_trace(g.adjacency(), z);
    benchmark::DoNotOptimize(t);
  }
}

template <bool Parallel>
void BM_MultiplicativeStep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix num = random_matrix(n, 200), den = random_matrix(n, 200);
  Matrix x = random_matrix(n, 200);
  for (auto _ : state) {
    if (Parallel)
      kernels::multiplicative_step(x, num, den, 1e-12);
    else
      kernels::serial::multiplicative_step(x, num, den, 1e-12);
    benchmark::DoNotOptimize(x.data());
  }
}

template <bool Parallel>
void BM_WalkLogMatrix(benchmark::State& state) {
  const Graph g = bench_graph(static_cast<std::size_t>(state.range(0)));
  const auto deg = degrees(g);
  const double vol = volume(g);
  for (auto _ : state) {
    Matrix m = Parallel ? kernels::walk_log_matrix(g.adjacency(), deg, vol, 5, 1.0)
                        : kernels::serial::walk_log_matrix(g.adjacency(), deg, vol, 5, 1.0);
    benchmark::DoNotOptimize(m.data());
  }
}

template <bool Parallel>
void BM_NearestCenters(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix x = random_matrix(n, 128), centers = random_matrix(16, 128);
  std::vector<int> label;
  std::vector<double> dist;
  for (auto _ : state) {
    if (Parallel)
      kernels::nearest_centers(x, centers, label, dist);
    else
      kernels::serial::nearest_centers(x, centers, label, dist);
    benchmark::DoNotOptimize(dist.data());
  }
}

}  // namespace

BENCHMARK(BM_Spmm<false>)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Spmm<true>)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SparseGramTrace<false>)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SparseGramTrace<true>)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiplicativeStep<false>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiplicativeStep<true>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WalkLogMatrix<false>)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WalkLogMatrix<true>)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestCenters<false>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestCenters<true>)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
