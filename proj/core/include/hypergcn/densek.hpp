#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hypergcn/gcn.hpp"
#include "hypergcn/hypergraph.hpp"
#include "hypergcn/matrix.hpp"
#include "hypergcn/models.hpp"
#include "hypergcn/random.hpp"

namespace hgcn {

/// Densest-k-subhypergraph: choose k vertices maximising the number of
/// hyperedges they fully contain.
struct DenseKInstance {
  Hypergraph hypergraph;
  std::size_t k = 0;
};

/// Throws std::invalid_argument unless 0 < k <= n and the hypergraph is valid.
void require_valid(const DenseKInstance& inst);

/// Number of hyperedges contained in `vertices` (ids may be in any order).
std::size_t density(const Hypergraph& h, std::span<const VertexId> vertices);

/// The k vertices of largest hyperedge count, ties to the lower id. Sorted.
std::vector<VertexId> max_degree(const DenseKInstance& inst);

/// Peels n - k times: the vertex of minimum residual degree (lower id on ties)
/// leaves the pool together with every residual hyperedge containing it.
/// Returns the k survivors, sorted.
std::vector<VertexId> remove_min_degree(const DenseKInstance& inst);

struct DenseKSolution {
  std::vector<VertexId> vertices;
  std::size_t density = 0;
};

/// Exhaustive search over all k-subsets in lexicographic order, keeping the
/// first optimum. Throws std::length_error if C(n, k) exceeds `limit`.
DenseKSolution brute_force(const DenseKInstance& inst, std::uint64_t limit = 1'000'000);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k) noexcept;

struct DenseKSample {
  Hypergraph hypergraph;
  std::vector<Label> target;  // 1 on the planted dense set
};

/// Plants a uniformly random k-subset W and draws floor(n/2) hyperedges, each
/// of a size uniform in {2, ..., 10}, from W with probability p and from V \ W
/// otherwise. A size larger than the chosen pool is redrawn; a pool with fewer
/// than two vertices is never chosen.
DenseKSample gen_sample(std::size_t n, std::size_t k, double p, Rng& rng);

enum class DenseKFeatures {
  degree,    // [degree / max degree, 1]
  gaussian,  // i.i.d. standard normal
};

/// Per-vertex input features for the learned solver.
Matrix densek_features(const Hypergraph& h, DenseKFeatures kind, std::size_t gaussian_dim, Rng& rng);

/// Mean binary cross-entropy between sigmoid(logits[:, map]) and the target.
Real map_bce(const Matrix& logits, std::size_t map, std::span<const Label> target);

/// min over maps of map_bce. Writes the minimising map (lowest index on ties).
Real hindsight_loss(const Matrix& logits, std::span<const Label> target, std::size_t* best_map = nullptr);

struct DenseKModel {
  Method method = Method::hypergcn;
  std::size_t maps = 1;
  DenseKFeatures features = DenseKFeatures::degree;
  std::size_t gaussian_dim = 16;
  SelfLoops self_loops = SelfLoops::unit;
  GcnParams params;
  std::vector<Real> loss_trace;  // mean hindsight loss per epoch
};

struct DenseKTrainOptions {
  std::size_t maps = 4;
  DenseKFeatures features = DenseKFeatures::degree;
  std::size_t gaussian_dim = 16;
};

/// Trains a two-layer network with `maps` sigmoid outputs, one Adam step per
/// sample per epoch (sample order shuffled each epoch), minimising the
/// hindsight loss. cfg.method selects the propagation; cfg.epochs the passes.
DenseKModel train_densek(std::span<const DenseKSample> samples, const TrainConfig& cfg,
                         const DenseKTrainOptions& options = {});

/// Probability maps (n x maps) of a trained model on a new hypergraph.
Matrix predict_maps(const DenseKModel& model, const Hypergraph& h, std::uint64_t seed);

/// Top-k vertices of each map (lower id on ties); returns the candidate of
/// largest density, the earliest map on ties. Sorted.
std::vector<VertexId> decode_topk(const Matrix& maps, const DenseKInstance& inst);

}  // namespace hgcn
