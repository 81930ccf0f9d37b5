#include "hypergcn/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hgcn {

Hypergraph::Hypergraph(std::size_t n, std::vector<Hyperedge> edges, std::vector<double> weights)
    : n_(n), edges_(std::move(edges)), weights_(std::move(weights)) {
  if (weights_.empty()) {
    weights_.assign(edges_.size(), 1.0);
  } else if (weights_.size() != edges_.size()) {
    throw std::invalid_argument("hypergraph: " + std::to_string(weights_.size()) + " weights for " +
                                std::to_string(edges_.size()) + " hyperedges");
  }
  for (auto& e : edges_) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
}

std::size_t Hypergraph::max_edge_size() const noexcept {
  std::size_t m = 0;
  for (const auto& e : edges_) m = std::max(m, e.size());
  return m;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << "hyperedge " << violations[i].edge << ": " << violations[i].message;
  }
  return os.str();
}

InvalidHypergraph::InvalidHypergraph(ValidationReport report)
    : std::invalid_argument("invalid hypergraph: " + report.to_string()), report_(std::move(report)) {}

ValidationReport validate(const Hypergraph& h) {
  ValidationReport report;
  const auto edges = h.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].size() < 2) {
      report.violations.push_back({e, "hyperedge size " + std::to_string(edges[e].size()) + " < 2"});
    }
    for (VertexId v : edges[e]) {
      if (v >= h.num_vertices()) {
        report.violations.push_back({e, "vertex " + std::to_string(v) + " out of range (n=" +
                                            std::to_string(h.num_vertices()) + ")"});
      }
    }
    const double w = h.weight(e);
    if (!std::isfinite(w) || w <= 0.0) {
      std::ostringstream os;
      os << "weight " << w << " is not finite and positive";
      report.violations.push_back({e, os.str()});
    }
  }
  return report;
}

void require_valid(const Hypergraph& h) {
  auto report = validate(h);
  if (!report.ok()) throw InvalidHypergraph(std::move(report));
}

std::vector<double> degrees(const Hypergraph& h) {
  std::vector<double> d(h.num_vertices(), 0.0);
  const auto edges = h.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    for (VertexId v : edges[e]) d[v] += h.weight(e);
  }
  return d;
}

std::vector<std::size_t> edge_degrees(const Hypergraph& h) {
  std::vector<std::size_t> d(h.num_vertices(), 0);
  for (const auto& e : h.edges()) {
    for (VertexId v : e) ++d[v];
  }
  return d;
}

SizeCounts size_counts(const Hypergraph& h) {
  SizeCounts c;
  for (const auto& e : h.edges()) {
    const std::uint64_t s = e.size();
    c.incidences += s;
    c.mediator += 2 * s - 3;
    c.clique += s * (s - 1) / 2;
  }
  return c;
}

}  // namespace hgcn
