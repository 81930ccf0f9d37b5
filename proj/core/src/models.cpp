#include "hypergcn/models.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hypergcn/optimizer.hpp"

namespace hgcn {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::hypergcn: return "hypergcn";
    case Method::one_hypergcn: return "one-hypergcn";
    case Method::fast_hypergcn: return "fast-hypergcn";
    case Method::hgnn: return "hgnn";
    case Method::mlp: return "mlp";
    case Method::mlp_hlr: return "mlp-hlr";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

Propagation::Propagation(Method method, const Hypergraph& h, const Matrix& features, SelfLoops loops,
                         std::uint64_t tie_seed)
    : method_(method), hypergraph_(&h), loops_(loops), ties_(make_rng(tie_seed, Stream::ties)) {
  require_valid(h);
  if (features.rows() != h.num_vertices()) {
    throw std::invalid_argument("propagation: feature matrix has " + std::to_string(features.rows()) + " rows for " +
                                std::to_string(h.num_vertices()) + " vertices");
  }
  switch (method) {
    case Method::hypergcn:
    case Method::one_hypergcn:
      break;
    case Method::fast_hypergcn: {
      auto g = expand_mediators(h, features, ties_, loops);
      last_pairs_ = g.num_pairs();
      static_ = std::make_shared<const NormalizedAdjacency>(normalize(g));
      break;
    }
    case Method::hgnn: {
      auto g = expand_clique(h, loops);
      last_pairs_ = g.num_pairs();
      static_ = std::make_shared<const NormalizedAdjacency>(normalize(g));
      break;
    }
    case Method::mlp_hlr:
      regularizer_ = expand_mediators(h, features, ties_, loops);
      [[fallthrough]];
    case Method::mlp:
      static_ = std::make_shared<const NormalizedAdjacency>(NormalizedAdjacency::identity(h.num_vertices()));
      break;
  }
}

AdjacencyPtr Propagation::adjacency(int /*layer*/, const Matrix& input, const Matrix& weights) {
  if (static_) return static_;
  const Matrix signal = matmul(input, weights);
  auto g = method_ == Method::hypergcn ? expand_mediators(*hypergraph_, signal, ties_, loops_)
                                       : expand_one_edge(*hypergraph_, signal, ties_, loops_);
  last_pairs_ = g.num_pairs();
  return std::make_shared<const NormalizedAdjacency>(normalize(g));
}

AdjacencyProvider Propagation::provider() {
  return [this](int layer, const Matrix& input, const Matrix& weights) { return adjacency(layer, input, weights); };
}

Real laplacian_penalty(const WeightedGraph& g, const Matrix& probs, Real lambda) {
  Real total{0};
  for (const auto& p : g.pairs()) {
    const auto zu = probs.row(p.u);
    const auto zv = probs.row(p.v);
    Real sq{0};
    for (std::size_t j = 0; j < zu.size(); ++j) sq += (zu[j] - zv[j]) * (zu[j] - zv[j]);
    total += static_cast<Real>(p.weight) * sq;
  }
  return lambda * total;
}

Matrix laplacian_penalty_gradient(const WeightedGraph& g, const Matrix& probs, Real lambda) {
  Matrix grad(probs.rows(), probs.cols());
  for (const auto& p : g.pairs()) {
    const auto zu = probs.row(p.u);
    const auto zv = probs.row(p.v);
    auto gu = grad.row(p.u);
    auto gv = grad.row(p.v);
    const Real c = Real{2} * lambda * static_cast<Real>(p.weight);
    for (std::size_t j = 0; j < zu.size(); ++j) {
      const Real d = c * (zu[j] - zv[j]);
      gu[j] += d;
      gv[j] -= d;
    }
  }
  return grad;
}

Objective ssl_objective(Propagation& propagation, const Matrix& x, const GcnParams& params, const LabeledSplit& split,
                        const TrainConfig& cfg, const DropoutMasks* masks) {
  Objective obj;
  obj.forward = forward_gcn(propagation.provider(), x, params, masks);
  obj.loss = loss_ce(obj.forward.logits, split.labels, split.labelled);
  Matrix logit_grad = ce_logit_gradient(obj.forward.probs, split.labels, split.labelled);
  if (propagation.method() == Method::mlp_hlr) {
    const auto& g = propagation.regularizer_graph();
    obj.loss += laplacian_penalty(g, obj.forward.probs, cfg.hlr_lambda);
    axpy(logit_grad, Real{1},
         softmax_backward(obj.forward.probs, laplacian_penalty_gradient(g, obj.forward.probs, cfg.hlr_lambda)));
  }
  obj.grads = backward_gcn(obj.forward.cache, params, logit_grad);
  return obj;
}

double evaluate(const Matrix& probs, const LabeledSplit& split) {
  if (split.evaluation.empty()) throw std::invalid_argument("evaluate: empty evaluation set");
  std::size_t wrong = 0;
  for (VertexId v : split.evaluation) {
    const auto row = probs.row(v);
    const auto best = static_cast<Label>(std::max_element(row.begin(), row.end()) - row.begin());
    if (best != split.labels.at(v)) ++wrong;
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(split.evaluation.size());
}

TrainReport train_ssl(const Hypergraph& h, const Matrix& x, const LabeledSplit& split, const TrainConfig& cfg,
                      const TrainOptions& options) {
  if (x.rows() != h.num_vertices()) {
    throw std::invalid_argument("train_ssl: " + std::to_string(x.rows()) + " feature rows for " +
                                std::to_string(h.num_vertices()) + " vertices");
  }
  if (split.labels.size() != h.num_vertices()) throw std::invalid_argument("train_ssl: label vector length differs from n");
  if (split.labelled.empty()) throw std::invalid_argument("train_ssl: empty labelled set");
  Label top = 0;
  for (Label y : split.labels) top = std::max(top, y);
  const auto num_classes = static_cast<std::size_t>(top) + 1;

  Propagation propagation(cfg.method, h, x, cfg.self_loops, cfg.seed);
  Rng init = make_rng(cfg.seed, Stream::init);
  Rng drop = make_rng(cfg.seed, Stream::dropout);
  GcnParams params;
  params.input_weights = glorot_init(x.cols(), cfg.hidden, init);
  params.output_weights = glorot_init(cfg.hidden, num_classes, init);
  OptimizerState opt(AdamConfig{.learning_rate = cfg.learning_rate, .weight_decay = cfg.weight_decay, .decay_mode = cfg.decay_mode});

  TrainReport report;
  report.method = cfg.method;
  report.seed = cfg.seed;
  report.epochs = cfg.epochs;
  report.counts = size_counts(h);
  report.loss_trace.reserve(cfg.epochs);

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::optional<DropoutMasks> masks;
    if (cfg.dropout > Real{0}) {
      masks.emplace();
      masks->input = dropout_mask(x.rows(), x.cols(), cfg.dropout, drop);
      masks->hidden = dropout_mask(x.rows(), cfg.hidden, cfg.dropout, drop);
    }
    auto obj = ssl_objective(propagation, x, params, split, cfg, masks ? &*masks : nullptr);
    if (!std::isfinite(obj.loss)) throw std::runtime_error("train_ssl: non-finite loss at epoch " + std::to_string(epoch));
    report.loss_trace.push_back(obj.loss);
    if (options.record_adjacency) {
      report.adjacency_trace.push_back(obj.forward.cache.adjacency[0]);
      report.adjacency_trace.push_back(obj.forward.cache.adjacency[1]);
    }
    adam_step(params, obj.grads, opt);
    if (!all_finite(params.input_weights) || !all_finite(params.output_weights)) {
      throw std::runtime_error("train_ssl: non-finite parameters at epoch " + std::to_string(epoch));
    }
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  report.seconds_per_epoch = cfg.epochs ? elapsed.count() / static_cast<double>(cfg.epochs) : 0.0;

  const auto final_pass = forward_gcn(propagation.provider(), x, params, nullptr);
  report.graph_pairs = propagation.last_pair_count();
  report.test_error = evaluate(final_pass.probs, split);
  return report;
}

TrialSummary run_trials(const Hypergraph& h, const Matrix& x, std::span<const Label> labels, std::size_t num_classes,
                        const TrainConfig& cfg, std::size_t trials, std::size_t budget, std::size_t threads) {
  if (trials == 0) throw std::invalid_argument("run_trials: at least one trial required");
  TrialSummary summary;
  summary.reports.resize(trials);
  std::vector<std::exception_ptr> errors(trials);

  auto run_one = [&](std::size_t t) {
    try {
      TrainConfig trial_cfg = cfg;
      trial_cfg.seed = cfg.seed + t;
      Rng split_rng = make_rng(trial_cfg.seed, Stream::split);
      const auto split = balanced_split(labels, num_classes, budget, split_rng);
      summary.reports[t] = train_ssl(h, x, split, trial_cfg);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, trials);
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) run_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < trials; t = next++) run_one(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double sum = 0;
  for (const auto& r : summary.reports) sum += r.test_error;
  summary.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double sq = 0;
    for (const auto& r : summary.reports) sq += (r.test_error - summary.mean) * (r.test_error - summary.mean);
    summary.stdev = std::sqrt(sq / static_cast<double>(trials - 1));
  }
  return summary;
}

std::string to_json(const TrainReport& report) {
  nlohmann::json j;
  j["method"] = std::string(to_string(report.method));
  j["seed"] = report.seed;
  j["epochs"] = report.epochs;
  j["test_error"] = report.test_error;
  j["final_loss"] = report.loss_trace.empty() ? 0.0 : static_cast<double>(report.loss_trace.back());
  j["loss_trace"] = report.loss_trace;
  j["counts"] = {{"N", report.counts.incidences}, {"N_m", report.counts.mediator}, {"N_c", report.counts.clique}};
  j["graph_pairs"] = report.graph_pairs;
  j["seconds_per_epoch"] = report.seconds_per_epoch;
  return j.dump();
}

}  // namespace hgcn
