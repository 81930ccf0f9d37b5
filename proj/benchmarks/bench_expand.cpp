#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "hypergcn/expand.hpp"
#include "hypergcn/gcn.hpp"

namespace {

using namespace hgcn;

// n vertices, m hyperedges all of size s.
Hypergraph uniform_hypergraph(std::size_t n, std::size_t m, std::size_t s) {
  Rng rng(7);
  std::vector<VertexId> all(n);
  std::iota(all.begin(), all.end(), VertexId{0});
  std::vector<Hyperedge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    Hyperedge e;
    std::sample(all.begin(), all.end(), std::back_inserter(e), s, rng);
    edges.push_back(std::move(e));
  }
  return Hypergraph(n, std::move(edges));
}

Matrix gaussian(std::size_t rows, std::size_t cols) {
  Rng rng(11);
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Real& v : m.values()) v = static_cast<Real>(g(rng));
  return m;
}

void BM_ExpandMediators(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  const auto h = uniform_hypergraph(2000, 200, s);
  const auto signal = gaussian(2000, 16);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(expand_mediators(h, signal, rng));
  state.counters["pairs"] = static_cast<double>(size_counts(h).mediator);
}

void BM_ExpandClique(benchmark::State& state) {
  const auto h = uniform_hypergraph(2000, 200, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(expand_clique(h));
  state.counters["pairs"] = static_cast<double>(size_counts(h).clique);
}

void BM_Normalize(benchmark::State& state) {
  const auto g = expand_clique(uniform_hypergraph(2000, 200, static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(normalize(g));
}

void BM_Spmm(benchmark::State& state) {
  const auto a = normalize(expand_clique(uniform_hypergraph(2000, 200, static_cast<std::size_t>(state.range(0)))));
  const auto x = gaussian(2000, 32);
  for (auto _ : state) benchmark::DoNotOptimize(spmm(a, x));
  state.counters["nnz"] = static_cast<double>(a.nnz());
}

BENCHMARK(BM_ExpandMediators)->Arg(5)->Arg(20)->Arg(50);
BENCHMARK(BM_ExpandClique)->Arg(5)->Arg(20)->Arg(50);
BENCHMARK(BM_Normalize)->Arg(5)->Arg(20)->Arg(50);
BENCHMARK(BM_Spmm)->Arg(5)->Arg(20)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
