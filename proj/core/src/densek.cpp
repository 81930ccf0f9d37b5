#include "hypergcn/densek.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "hypergcn/optimizer.hpp"

namespace hgcn {

void require_valid(const DenseKInstance& inst) {
  require_valid(inst.hypergraph);
  if (inst.k == 0 || inst.k > inst.hypergraph.num_vertices()) {
    throw std::invalid_argument("densest-k: k=" + std::to_string(inst.k) + " must lie in [1, " +
                                std::to_string(inst.hypergraph.num_vertices()) + "]");
  }
}

std::size_t density(const Hypergraph& h, std::span<const VertexId> vertices) {
  std::vector<char> member(h.num_vertices(), 0);
  for (VertexId v : vertices) member.at(v) = 1;
  std::size_t count = 0;
  for (const auto& e : h.edges()) {
    if (std::all_of(e.begin(), e.end(), [&](VertexId v) { return member[v] != 0; })) ++count;
  }
  return count;
}

std::vector<VertexId> max_degree(const DenseKInstance& inst) {
  require_valid(inst);
  const auto deg = edge_degrees(inst.hypergraph);
  std::vector<VertexId> order(deg.size());
  std::iota(order.begin(), order.end(), VertexId{0});
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return deg[a] > deg[b]; });
  order.resize(inst.k);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<VertexId> remove_min_degree(const DenseKInstance& inst) {
  require_valid(inst);
  const auto& h = inst.hypergraph;
  const std::size_t n = h.num_vertices();
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    for (VertexId v : h.edge(e)) incident[v].push_back(e);
  }
  std::vector<std::size_t> residual(n);
  std::set<std::pair<std::size_t, VertexId>> pool;
  for (std::size_t v = 0; v < n; ++v) {
    residual[v] = incident[v].size();
    pool.emplace(residual[v], static_cast<VertexId>(v));
  }
  std::vector<char> alive_edge(h.num_edges(), 1);
  std::vector<char> in_pool(n, 1);
  for (std::size_t step = 0; step < n - inst.k; ++step) {
    const VertexId v = pool.begin()->second;
    pool.erase(pool.begin());
    in_pool[v] = 0;
    for (std::size_t e : incident[v]) {
      if (!alive_edge[e]) continue;
      alive_edge[e] = 0;
      for (VertexId u : h.edge(e)) {
        if (u == v || !in_pool[u]) continue;
        pool.erase({residual[u], u});
        --residual[u];
        pool.emplace(residual[u], u);
      }
    }
  }
  std::vector<VertexId> out;
  out.reserve(inst.k);
  for (std::size_t v = 0; v < n; ++v) {
    if (in_pool[v]) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

std::uint64_t binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto saturated = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t factor = n - k + i;
    if (r > saturated / factor) return saturated;
    r = r * factor / i;
  }
  return r;
}

DenseKSolution brute_force(const DenseKInstance& inst, std::uint64_t limit) {
  require_valid(inst);
  const auto& h = inst.hypergraph;
  const std::size_t n = h.num_vertices();
  const std::size_t k = inst.k;
  if (binomial(n, k) > limit) {
    throw std::length_error("brute_force: instance too large (C(" + std::to_string(n) + ", " + std::to_string(k) +
                            ") exceeds " + std::to_string(limit) + ")");
  }
  std::vector<std::uint64_t> edge_masks;
  const bool use_masks = n <= 64;
  if (use_masks) {
    for (const auto& e : h.edges()) {
      std::uint64_t m = 0;
      for (VertexId v : e) m |= std::uint64_t{1} << v;
      edge_masks.push_back(m);
    }
  }
  std::vector<VertexId> combo(k);
  std::iota(combo.begin(), combo.end(), VertexId{0});
  DenseKSolution best;
  bool first = true;
  while (true) {
    std::size_t d = 0;
    if (use_masks) {
      std::uint64_t s = 0;
      for (VertexId v : combo) s |= std::uint64_t{1} << v;
      for (std::uint64_t m : edge_masks) d += (m & ~s) == 0;
    } else {
      d = density(h, combo);
    }
    if (first || d > best.density) {
      best.density = d;
      best.vertices = combo;
      first = false;
    }
    // Next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && combo[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
  return best;
}

DenseKSample gen_sample(std::size_t n, std::size_t k, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gen_sample: p must lie in [0, 1]");
  if (k > n) throw std::invalid_argument("gen_sample: k exceeds n");
  std::vector<VertexId> all(n);
  std::iota(all.begin(), all.end(), VertexId{0});
  std::vector<VertexId> dense;
  std::sample(all.begin(), all.end(), std::back_inserter(dense), k, rng);
  std::vector<VertexId> rest;
  std::set_difference(all.begin(), all.end(), dense.begin(), dense.end(), std::back_inserter(rest));
  if (dense.size() < 2 && rest.size() < 2) throw std::invalid_argument("gen_sample: no pool can hold a hyperedge");

  std::uniform_int_distribution<std::size_t> size_dist(2, 10);
  std::bernoulli_distribution inside(p);
  std::vector<Hyperedge> edges;
  const std::size_t m = n / 2;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t s = size_dist(rng);
    const std::vector<VertexId>* pool = inside(rng) ? &dense : &rest;
    if (pool->size() < 2) pool = pool == &dense ? &rest : &dense;
    while (s > pool->size()) s = size_dist(rng);
    Hyperedge e;
    std::sample(pool->begin(), pool->end(), std::back_inserter(e), s, rng);
    edges.push_back(std::move(e));
  }
  DenseKSample sample;
  sample.hypergraph = Hypergraph(n, std::move(edges));
  sample.target.assign(n, 0);
  for (VertexId v : dense) sample.target[v] = 1;
  return sample;
}

Matrix densek_features(const Hypergraph& h, DenseKFeatures kind, std::size_t gaussian_dim, Rng& rng) {
  const std::size_t n = h.num_vertices();
  if (kind == DenseKFeatures::gaussian) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix x(n, gaussian_dim);
    for (Real& v : x.values()) v = static_cast<Real>(gauss(rng));
    return x;
  }
  const auto deg = edge_degrees(h);
  const std::size_t top = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
  Matrix x(n, 2);
  for (std::size_t v = 0; v < n; ++v) {
    x(v, 0) = top ? static_cast<Real>(deg[v]) / static_cast<Real>(top) : Real{0};
    x(v, 1) = Real{1};
  }
  return x;
}

Real map_bce(const Matrix& logits, std::size_t map, std::span<const Label> target) {
  if (target.size() != logits.rows() || map >= logits.cols()) throw std::invalid_argument("map_bce: shape mismatch");
  Real total{0};
  for (std::size_t v = 0; v < logits.rows(); ++v) {
    const Real z = logits(v, map);
    const Real softplus = std::max(z, Real{0}) + std::log1p(std::exp(-std::abs(z)));
    total += softplus - static_cast<Real>(target[v]) * z;
  }
  return total / static_cast<Real>(logits.rows());
}

Real hindsight_loss(const Matrix& logits, std::span<const Label> target, std::size_t* best_map) {
  if (logits.cols() == 0) throw std::invalid_argument("hindsight_loss: no maps");
  Real best = std::numeric_limits<Real>::infinity();
  std::size_t arg = 0;
  for (std::size_t m = 0; m < logits.cols(); ++m) {
    const Real l = map_bce(logits, m, target);
    if (l < best) {
      best = l;
      arg = m;
    }
  }
  if (best_map) *best_map = arg;
  return best;
}

DenseKModel train_densek(std::span<const DenseKSample> samples, const TrainConfig& cfg,
                         const DenseKTrainOptions& options) {
  if (samples.empty()) throw std::invalid_argument("train_densek: empty training set");
  if (options.maps == 0) throw std::invalid_argument("train_densek: need at least one map");
  DenseKModel model;
  model.method = cfg.method;
  model.maps = options.maps;
  model.features = options.features;
  model.gaussian_dim = options.gaussian_dim;
  model.self_loops = cfg.self_loops;

  Rng feature_rng = make_rng(cfg.seed, Stream::generator);
  std::vector<Matrix> features;
  std::vector<Propagation> propagation;
  features.reserve(samples.size());
  propagation.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.target.size() != s.hypergraph.num_vertices()) {
      throw std::invalid_argument("train_densek: sample " + std::to_string(i) + " target length differs from n");
    }
    features.push_back(densek_features(s.hypergraph, options.features, options.gaussian_dim, feature_rng));
    propagation.emplace_back(cfg.method, s.hypergraph, features.back(), cfg.self_loops, cfg.seed + i);
  }

  Rng init = make_rng(cfg.seed, Stream::init);
  Rng drop = make_rng(cfg.seed, Stream::dropout);
  Rng shuffle = make_rng(cfg.seed, Stream::shuffle);
  const std::size_t in_dim = features.front().cols();
  model.params.input_weights = glorot_init(in_dim, cfg.hidden, init);
  model.params.output_weights = glorot_init(cfg.hidden, options.maps, init);
  OptimizerState opt(AdamConfig{.learning_rate = cfg.learning_rate, .weight_decay = cfg.weight_decay, .decay_mode = cfg.decay_mode});

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle);
    Real total{0};
    for (std::size_t i : order) {
      const auto& x = features[i];
      const auto& target = samples[i].target;
      std::optional<DropoutMasks> masks;
      if (cfg.dropout > Real{0}) {
        masks.emplace();
        masks->input = dropout_mask(x.rows(), x.cols(), cfg.dropout, drop);
        masks->hidden = dropout_mask(x.rows(), cfg.hidden, cfg.dropout, drop);
      }
      const auto fwd = forward_gcn(propagation[i].provider(), x, model.params, masks ? &*masks : nullptr);
      std::size_t best = 0;
      total += hindsight_loss(fwd.logits, target, &best);

      Matrix logit_grad(fwd.logits.rows(), fwd.logits.cols());
      const Real scale = Real{1} / static_cast<Real>(x.rows());
      for (std::size_t v = 0; v < x.rows(); ++v) {
        const Real z = fwd.logits(v, best);
        const Real prob = z >= Real{0} ? Real{1} / (Real{1} + std::exp(-z)) : std::exp(z) / (Real{1} + std::exp(z));
        logit_grad(v, best) = scale * (prob - static_cast<Real>(target[v]));
      }
      adam_step(model.params, backward_gcn(fwd.cache, model.params, logit_grad), opt);
    }
    model.loss_trace.push_back(total / static_cast<Real>(samples.size()));
  }
  return model;
}

Matrix predict_maps(const DenseKModel& model, const Hypergraph& h, std::uint64_t seed) {
  Rng feature_rng = make_rng(seed, Stream::generator);
  const Matrix x = densek_features(h, model.features, model.gaussian_dim, feature_rng);
  Propagation propagation(model.method, h, x, model.self_loops, seed);
  return sigmoid(forward_gcn(propagation.provider(), x, model.params, nullptr).logits);
}

std::vector<VertexId> decode_topk(const Matrix& maps, const DenseKInstance& inst) {
  require_valid(inst);
  const std::size_t n = inst.hypergraph.num_vertices();
  if (maps.rows() != n || maps.cols() == 0) throw std::invalid_argument("decode_topk: maps do not cover the instance");
  std::vector<VertexId> best;
  std::size_t best_density = 0;
  for (std::size_t m = 0; m < maps.cols(); ++m) {
    std::vector<VertexId> order(n);
    std::iota(order.begin(), order.end(), VertexId{0});
    std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return maps(a, m) > maps(b, m); });
    order.resize(inst.k);
    std::sort(order.begin(), order.end());
    const std::size_t d = density(inst.hypergraph, order);
    if (m == 0 || d > best_density) {
      best_density = d;
      best = std::move(order);
    }
  }
  return best;
}

}  // namespace hgcn
