#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgcn {

using VertexId = std::uint32_t;
using Hyperedge = std::vector<VertexId>;

/// Undirected, weighted hypergraph over vertices 0..n-1.
///
/// Each hyperedge is stored sorted with duplicate vertex ids removed. Repeated
/// hyperedges are kept; their contributions accumulate in every expansion.
/// Construction never rejects content; use validate() to check invariants.
class Hypergraph {
 public:
  Hypergraph() = default;

  /// Missing weights default to 1. Throws std::invalid_argument if a non-empty
  /// weight list does not match the number of hyperedges.
  explicit Hypergraph(std::size_t n, std::vector<Hyperedge> edges = {}, std::vector<double> weights = {});

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  std::span<const Hyperedge> edges() const noexcept { return edges_; }
  const Hyperedge& edge(std::size_t e) const { return edges_.at(e); }

  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t e) const { return weights_.at(e); }

  std::size_t max_edge_size() const noexcept;

  friend bool operator==(const Hypergraph&, const Hypergraph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Hyperedge> edges_;
  std::vector<double> weights_;
};

struct Violation {
  std::size_t edge;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  std::string to_string() const;
};

class InvalidHypergraph : public std::invalid_argument {
 public:
  explicit InvalidHypergraph(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Lists every violated invariant: hyperedges with fewer than two vertices,
/// out-of-range vertex ids, and non-finite or non-positive weights.
ValidationReport validate(const Hypergraph& h);

/// Throws InvalidHypergraph unless validate(h).ok().
void require_valid(const Hypergraph& h);

/// d_v = sum of w(e) over hyperedges containing v.
std::vector<double> degrees(const Hypergraph& h);

/// Number of hyperedges containing each vertex (weights ignored).
std::vector<std::size_t> edge_degrees(const Hypergraph& h);

/// Pair counts of the three expansions: incidences, mediator pairs, clique pairs.
struct SizeCounts {
  std::uint64_t incidences = 0;  // N   = sum |e|
  std::uint64_t mediator = 0;    // N_m = sum (2|e| - 3)
  std::uint64_t clique = 0;      // N_c = sum |e|(|e|-1)/2

  friend bool operator==(const SizeCounts&, const SizeCounts&) = default;
};

SizeCounts size_counts(const Hypergraph& h);

}  // namespace hgcn
