#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypergcn/hypergraph.hpp"
#include "hypergcn/matrix.hpp"
#include "hypergcn/random.hpp"

namespace hgcn {

/// One undirected pair {u, v} with u < v.
struct WeightedPair {
  VertexId u;
  VertexId v;
  double weight;

  friend bool operator==(const WeightedPair&, const WeightedPair&) = default;
};

/// Symmetric weighted graph produced by a hypergraph expansion: accumulated
/// pair weights (sorted by (u, v), one entry per pair) plus one self-loop weight
/// per vertex.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  std::size_t num_vertices() const noexcept { return loops_.size(); }
  std::size_t num_pairs() const noexcept { return pairs_.size(); }
  std::span<const WeightedPair> pairs() const noexcept { return pairs_; }
  std::span<const double> loops() const noexcept { return loops_; }

  /// Accumulated weight of {u, v}; 0 when absent.
  double pair_weight(VertexId u, VertexId v) const noexcept;
  double loop(VertexId v) const { return loops_.at(v); }

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  friend class WeightedGraphBuilder;
  std::vector<WeightedPair> pairs_;
  std::vector<double> loops_;
};

/// Collects pair contributions in insertion order. build() merges repeated
/// pairs by summing their weights in the order they were added, so the result
/// depends only on the sequence of contributions.
class WeightedGraphBuilder {
 public:
  explicit WeightedGraphBuilder(std::size_t n);

  void add_pair(VertexId a, VertexId b, double weight);
  void set_loop(VertexId v, double weight) { loops_.at(v) = weight; }
  void set_all_loops(double weight);
  void reserve(std::size_t pairs) { contributions_.reserve(pairs); }

  WeightedGraph build() &&;

 private:
  std::vector<WeightedPair> contributions_;
  std::vector<double> loops_;
};

/// Self-loop convention applied after the pair weights are accumulated.
enum class SelfLoops {
  /// A_vv = 1 for every vertex.
  unit,
  /// A_vv = d_v - (pair weight incident on v), so each vertex's weighted degree
  /// equals its hypergraph degree. Vertices in no hyperedge get a unit loop.
  degree_restoring,
};

/// Vertex pair of a hyperedge at maximum signal distance; first < second.
struct ExtremePair {
  VertexId first;
  VertexId second;

  friend bool operator==(const ExtremePair&, const ExtremePair&) = default;
};

/// Returns the pair {i, j} in `edge` maximising ||S_i - S_j||_2. Consumes exactly
/// one draw from `rng`, which selects uniformly among tied maximisers.
ExtremePair extreme_pair(std::span<const VertexId> edge, const Matrix& signal, Rng& rng);
ExtremePair extreme_pair(const Hypergraph& h, std::size_t edge, const Matrix& signal, Rng& rng);

/// The pairs one hyperedge contributes under the mediator rule, each of weight
/// w / (2|e| - 3): the extreme pair, then {first, k} and {second, k} for each
/// mediator k. A size-2 hyperedge yields the single pair with weight w.
std::vector<WeightedPair> mediator_contributions(std::span<const VertexId> edge, ExtremePair extremes,
                                                 double weight);

/// One pair per hyperedge, the extreme pair, with weight w(e) / |e|.
WeightedGraph expand_one_edge(const Hypergraph& h, const Matrix& signal, Rng& rng,
                              SelfLoops loops = SelfLoops::unit);

/// Extreme pair plus every extreme-mediator pair, each weighted w(e) / (2|e| - 3).
WeightedGraph expand_mediators(const Hypergraph& h, const Matrix& signal, Rng& rng,
                               SelfLoops loops = SelfLoops::unit);

/// Every pair inside each hyperedge, weighted 2 w(e) / (|e| (|e| - 1)).
WeightedGraph expand_clique(const Hypergraph& h, SelfLoops loops = SelfLoops::unit);

/// Symmetrically normalised adjacency D^-1/2 A D^-1/2 stored in CSR form, with
/// columns sorted within each row.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency() = default;

  static NormalizedAdjacency identity(std::size_t n);

  std::size_t num_vertices() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const VertexId> col_index() const noexcept { return col_index_; }
  std::span<const Real> values() const noexcept { return values_; }

  Matrix to_dense() const;

  friend bool operator==(const NormalizedAdjacency&, const NormalizedAdjacency&) = default;

 private:
  friend NormalizedAdjacency normalize(const WeightedGraph& g);
  std::vector<std::size_t> row_ptr_;
  std::vector<VertexId> col_index_;
  std::vector<Real> values_;
};

/// Throws std::domain_error if some vertex has neither a self-loop nor an
/// incident pair.
NormalizedAdjacency normalize(const WeightedGraph& g);

}  // namespace hgcn
