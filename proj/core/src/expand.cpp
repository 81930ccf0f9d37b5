#include "hypergcn/expand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace hgcn {

double WeightedGraph::pair_weight(VertexId u, VertexId v) const noexcept {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair{u, v},
                             [](const WeightedPair& p, const std::pair<VertexId, VertexId>& key) {
                               return std::tie(p.u, p.v) < std::tie(key.first, key.second);
                             });
  if (it == pairs_.end() || it->u != u || it->v != v) return 0.0;
  return it->weight;
}

WeightedGraphBuilder::WeightedGraphBuilder(std::size_t n) : loops_(n, 0.0) {}

void WeightedGraphBuilder::add_pair(VertexId a, VertexId b, double weight) {
  if (a == b) throw std::invalid_argument("weighted graph: pair endpoints must differ");
  if (a > b) std::swap(a, b);
  contributions_.push_back({a, b, weight});
}

void WeightedGraphBuilder::set_all_loops(double weight) { std::fill(loops_.begin(), loops_.end(), weight); }

WeightedGraph WeightedGraphBuilder::build() && {
  std::stable_sort(contributions_.begin(), contributions_.end(), [](const WeightedPair& a, const WeightedPair& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  WeightedGraph g;
  g.loops_ = std::move(loops_);
  auto& out = g.pairs_;
  for (const auto& c : contributions_) {
    if (!out.empty() && out.back().u == c.u && out.back().v == c.v) {
      out.back().weight += c.weight;
    } else {
      out.push_back(c);
    }
  }
  return g;
}

namespace {

double squared_distance(const Matrix& s, VertexId a, VertexId b) {
  const auto ra = s.row(a);
  const auto rb = s.row(b);
  double acc = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    const double d = static_cast<double>(ra[k]) - static_cast<double>(rb[k]);
    acc += d * d;
  }
  return acc;
}

WeightedGraph finish(WeightedGraphBuilder&& builder, const Hypergraph& h, SelfLoops loops) {
  if (loops == SelfLoops::unit) {
    builder.set_all_loops(1.0);
    return std::move(builder).build();
  }
  WeightedGraph pairs_only = std::move(builder).build();
  std::vector<double> incident(h.num_vertices(), 0.0);
  for (const auto& p : pairs_only.pairs()) {
    incident[p.u] += p.weight;
    incident[p.v] += p.weight;
  }
  const auto d = degrees(h);
  WeightedGraphBuilder rebuilt(h.num_vertices());
  rebuilt.reserve(pairs_only.num_pairs());
  for (const auto& p : pairs_only.pairs()) rebuilt.add_pair(p.u, p.v, p.weight);
  for (std::size_t v = 0; v < d.size(); ++v) {
    const auto id = static_cast<VertexId>(v);
    rebuilt.set_loop(id, d[v] > 0.0 ? std::max(0.0, d[v] - incident[v]) : 1.0);
  }
  return std::move(rebuilt).build();
}

void require_signal_rows(const Hypergraph& h, const Matrix& signal) {
  if (signal.rows() != h.num_vertices()) {
    throw std::invalid_argument("expansion: signal has " + std::to_string(signal.rows()) + " rows for " +
                                std::to_string(h.num_vertices()) + " vertices");
  }
}

}  // namespace

ExtremePair extreme_pair(std::span<const VertexId> edge, const Matrix& signal, Rng& rng) {
  if (edge.size() < 2) throw std::invalid_argument("extreme_pair: hyperedge has fewer than two vertices");
  const std::uint64_t draw = rng();
  double best = -1.0;
  std::size_t ties = 0;
  for (std::size_t a = 0; a < edge.size(); ++a) {
    for (std::size_t b = a + 1; b < edge.size(); ++b) {
      const double d = squared_distance(signal, edge[a], edge[b]);
      if (d > best) {
        best = d;
        ties = 1;
      } else if (d == best) {
        ++ties;
      }
    }
  }
  std::size_t pick = static_cast<std::size_t>(draw % ties);
  for (std::size_t a = 0; a < edge.size(); ++a) {
    for (std::size_t b = a + 1; b < edge.size(); ++b) {
      if (squared_distance(signal, edge[a], edge[b]) != best) continue;
      if (pick-- == 0) {
        return edge[a] < edge[b] ? ExtremePair{edge[a], edge[b]} : ExtremePair{edge[b], edge[a]};
      }
    }
  }
  throw std::logic_error("extreme_pair: tie selection fell through");
}

ExtremePair extreme_pair(const Hypergraph& h, std::size_t edge, const Matrix& signal, Rng& rng) {
  require_signal_rows(h, signal);
  return extreme_pair(h.edge(edge), signal, rng);
}

std::vector<WeightedPair> mediator_contributions(std::span<const VertexId> edge, ExtremePair extremes,
                                                 double weight) {
  std::vector<WeightedPair> out;
  const std::size_t s = edge.size();
  const double w = weight * (1.0 / static_cast<double>(2 * s - 3));
  out.reserve(2 * s - 3);
  out.push_back({extremes.first, extremes.second, w});
  for (VertexId k : edge) {
    if (k == extremes.first || k == extremes.second) continue;
    out.push_back({std::min(extremes.first, k), std::max(extremes.first, k), w});
    out.push_back({std::min(extremes.second, k), std::max(extremes.second, k), w});
  }
  return out;
}

WeightedGraph expand_one_edge(const Hypergraph& h, const Matrix& signal, Rng& rng, SelfLoops loops) {
  require_valid(h);
  require_signal_rows(h, signal);
  WeightedGraphBuilder builder(h.num_vertices());
  builder.reserve(h.num_edges());
  const auto edges = h.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto pair = extreme_pair(edges[e], signal, rng);
    builder.add_pair(pair.first, pair.second, h.weight(e) * (1.0 / static_cast<double>(edges[e].size())));
  }
  return finish(std::move(builder), h, loops);
}

WeightedGraph expand_mediators(const Hypergraph& h, const Matrix& signal, Rng& rng, SelfLoops loops) {
  require_valid(h);
  require_signal_rows(h, signal);
  WeightedGraphBuilder builder(h.num_vertices());
  builder.reserve(size_counts(h).mediator);
  const auto edges = h.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto pair = extreme_pair(edges[e], signal, rng);
    for (const auto& p : mediator_contributions(edges[e], pair, h.weight(e))) builder.add_pair(p.u, p.v, p.weight);
  }
  return finish(std::move(builder), h, loops);
}

WeightedGraph expand_clique(const Hypergraph& h, SelfLoops loops) {
  require_valid(h);
  WeightedGraphBuilder builder(h.num_vertices());
  builder.reserve(size_counts(h).clique);
  const auto edges = h.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto s = static_cast<double>(edges[e].size());
    const double w = h.weight(e) * (2.0 / (s * (s - 1.0)));
    const auto& edge = edges[e];
    for (std::size_t a = 0; a < edge.size(); ++a)
      for (std::size_t b = a + 1; b < edge.size(); ++b) builder.add_pair(edge[a], edge[b], w);
  }
  return finish(std::move(builder), h, loops);
}

NormalizedAdjacency NormalizedAdjacency::identity(std::size_t n) {
  NormalizedAdjacency a;
  a.row_ptr_.resize(n + 1);
  a.col_index_.resize(n);
  a.values_.assign(n, Real{1});
  for (std::size_t i = 0; i < n; ++i) {
    a.row_ptr_[i + 1] = i + 1;
    a.col_index_[i] = static_cast<VertexId>(i);
  }
  return a;
}

Matrix NormalizedAdjacency::to_dense() const {
  const std::size_t n = num_vertices();
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) m(r, col_index_[k]) = values_[k];
  return m;
}

NormalizedAdjacency normalize(const WeightedGraph& g) {
  const std::size_t n = g.num_vertices();
  struct Entry {
    VertexId col;
    double weight;
  };
  std::vector<std::vector<Entry>> rows(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (g.loops()[v] > 0.0) rows[v].push_back({static_cast<VertexId>(v), g.loops()[v]});
  }
  for (const auto& p : g.pairs()) {
    if (p.weight <= 0.0) continue;
    rows[p.u].push_back({p.v, p.weight});
    rows[p.v].push_back({p.u, p.weight});
  }
  std::vector<double> degree(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(rows[v].begin(), rows[v].end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    for (const auto& e : rows[v]) degree[v] += e.weight;
    if (!(degree[v] > 0.0)) {
      throw std::domain_error("normalize: isolated vertex with no self-loop (vertex " + std::to_string(v) + ")");
    }
  }
  NormalizedAdjacency a;
  a.row_ptr_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) a.row_ptr_[v + 1] = a.row_ptr_[v] + rows[v].size();
  a.col_index_.reserve(a.row_ptr_[n]);
  a.values_.reserve(a.row_ptr_[n]);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& e : rows[v]) {
      a.col_index_.push_back(e.col);
      a.values_.push_back(static_cast<Real>(e.weight / std::sqrt(degree[v] * degree[e.col])));
    }
  }
  return a;
}

}  // namespace hgcn
