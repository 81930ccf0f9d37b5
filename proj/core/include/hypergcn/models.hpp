#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hypergcn/dataio.hpp"
#include "hypergcn/expand.hpp"
#include "hypergcn/gcn.hpp"
#include "hypergcn/hypergraph.hpp"
#include "hypergcn/matrix.hpp"
#include "hypergcn/optimizer.hpp"

namespace hgcn {

enum class Method {
  hypergcn,       // mediator expansion, re-estimated every epoch and layer
  one_hypergcn,   // one pair per hyperedge, re-estimated every epoch and layer
  fast_hypergcn,  // mediator expansion from the input features, built once
  hgnn,           // clique expansion, built once
  mlp,            // identity propagation
  mlp_hlr,        // identity propagation plus a mediator-graph smoothness penalty
};

inline constexpr Method kAllMethods[] = {Method::hypergcn, Method::one_hypergcn, Method::fast_hypergcn,
                                         Method::hgnn,     Method::mlp,          Method::mlp_hlr};

std::string_view to_string(Method m) noexcept;
/// Accepts the names printed by to_string ("hypergcn", "one-hypergcn", ...).
/// Throws std::invalid_argument for anything else.
Method parse_method(std::string_view name);

struct TrainConfig {
  std::size_t hidden = 32;
  Real dropout = Real(0.5);
  Real learning_rate = Real(0.01);
  Real weight_decay = Real(5e-4);
  WeightDecay decay_mode = WeightDecay::decoupled;
  std::size_t epochs = 200;
  Real hlr_lambda = Real(0.001);
  std::uint64_t seed = 0;
  Method method = Method::hypergcn;
  SelfLoops self_loops = SelfLoops::unit;
};

/// Produces the propagation matrices of one method on one hypergraph.
///
/// Static methods build their matrix once at construction and hand out the
/// same object on every call. hypergcn and one-hypergcn rebuild the expansion
/// on each call from signal = input * weights, drawing tie-breaks from their
/// own stream.
class Propagation {
 public:
  Propagation(Method method, const Hypergraph& h, const Matrix& features, SelfLoops loops, std::uint64_t tie_seed);

  AdjacencyPtr adjacency(int layer, const Matrix& input, const Matrix& weights);
  AdjacencyProvider provider();

  Method method() const noexcept { return method_; }
  bool is_static() const noexcept { return static_ != nullptr; }
  /// Distinct pairs in the most recently produced graph (0 for identity).
  std::size_t last_pair_count() const noexcept { return last_pairs_; }
  /// Mediator graph over the input features; only built for mlp-hlr.
  const WeightedGraph& regularizer_graph() const noexcept { return regularizer_; }

 private:
  Method method_;
  const Hypergraph* hypergraph_;
  SelfLoops loops_;
  Rng ties_;
  AdjacencyPtr static_;
  WeightedGraph regularizer_;
  std::size_t last_pairs_ = 0;
};

/// lambda * sum over pairs {u, v} of w(u, v) * ||Z_u - Z_v||^2.
Real laplacian_penalty(const WeightedGraph& g, const Matrix& probs, Real lambda);
/// Gradient of laplacian_penalty with respect to probs.
Matrix laplacian_penalty_gradient(const WeightedGraph& g, const Matrix& probs, Real lambda);

struct Objective {
  Real loss = 0;
  GcnParams grads;
  GcnForward forward;
};

/// Training loss of `cfg.method` (mean cross-entropy over the labelled set, plus
/// the HLR penalty for mlp-hlr) and its gradients.
Objective ssl_objective(Propagation& propagation, const Matrix& x, const GcnParams& params, const LabeledSplit& split,
                        const TrainConfig& cfg, const DropoutMasks* masks);

struct TrainReport {
  Method method = Method::hypergcn;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::vector<Real> loss_trace;
  double test_error = 0;  // percent
  double seconds_per_epoch = 0;
  SizeCounts counts;
  std::size_t graph_pairs = 0;
  std::vector<std::shared_ptr<const NormalizedAdjacency>> adjacency_trace;  // filled when requested
};

struct TrainOptions {
  /// Keep the propagation matrices used in every epoch (layer 0 then layer 1).
  bool record_adjacency = false;
};

/// Trains the two-layer network for cfg.epochs Adam steps and reports the
/// error on the evaluation set. Seeds for initialisation, dropout and
/// tie-breaking are independent streams of cfg.seed.
TrainReport train_ssl(const Hypergraph& h, const Matrix& x, const LabeledSplit& split, const TrainConfig& cfg,
                      const TrainOptions& options = {});

/// Percentage of evaluation vertices whose arg-max class (lowest index on
/// ties) differs from the label. Throws std::invalid_argument if the
/// evaluation set is empty.
double evaluate(const Matrix& probs, const LabeledSplit& split);

struct TrialSummary {
  double mean = 0;
  double stdev = 0;  // sample standard deviation; 0 for a single trial
  std::vector<TrainReport> reports;
};

/// Trial t uses seed cfg.seed + t for its class-balanced split and training.
/// Trials run on up to `threads` workers; reports stay in trial order.
TrialSummary run_trials(const Hypergraph& h, const Matrix& x, std::span<const Label> labels, std::size_t num_classes,
                        const TrainConfig& cfg, std::size_t trials, std::size_t budget, std::size_t threads = 1);

/// One JSON object, no trailing newline.
std::string to_json(const TrainReport& report);

}  // namespace hgcn
