#include "hypergcn/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hgcn {

Matrix spmm(const NormalizedAdjacency& a, const Matrix& x) {
  if (a.num_vertices() != x.rows()) {
    throw std::invalid_argument("spmm: adjacency over " + std::to_string(a.num_vertices()) + " vertices, matrix has " +
                                std::to_string(x.rows()) + " rows");
  }
  const auto row_ptr = a.row_ptr();
  const auto cols = a.col_index();
  const auto vals = a.values();
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto dst = out.row(r);
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const Real w = vals[k];
      const auto src = x.row(cols[k]);
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] += w * src[j];
    }
  }
  return out;
}

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (Real& v : out.values()) v = std::max(v, Real{0});
  return out;
}

Matrix sigmoid(const Matrix& x) {
  Matrix out = x;
  for (Real& v : out.values()) {
    v = v >= Real{0} ? Real{1} / (Real{1} + std::exp(-v)) : std::exp(v) / (Real{1} + std::exp(v));
  }
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out = logits;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const Real m = *std::max_element(row.begin(), row.end());
    Real total{0};
    for (Real& v : row) {
      v = std::exp(v - m);
      total += v;
    }
    for (Real& v : row) v /= total;
  }
  return out;
}

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out = logits;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const Real m = *std::max_element(row.begin(), row.end());
    Real total{0};
    for (Real v : row) total += std::exp(v - m);
    const Real lse = m + std::log(total);
    for (Real& v : row) v -= lse;
  }
  return out;
}

Matrix softmax_backward(const Matrix& probs, const Matrix& grad_probs) {
  require_same_shape(probs, grad_probs, "softmax_backward");
  Matrix out(probs.rows(), probs.cols());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const auto z = probs.row(r);
    const auto g = grad_probs.row(r);
    Real dot{0};
    for (std::size_t j = 0; j < z.size(); ++j) dot += z[j] * g[j];
    auto o = out.row(r);
    for (std::size_t j = 0; j < z.size(); ++j) o[j] = z[j] * (g[j] - dot);
  }
  return out;
}

Matrix glorot_init(std::size_t rows, std::size_t cols, Rng& rng) {
  const Real limit = std::sqrt(Real(6) / static_cast<Real>(rows + cols));
  std::uniform_real_distribution<Real> dist(-limit, limit);
  Matrix m(rows, cols);
  for (Real& v : m.values()) v = dist(rng);
  return m;
}

Matrix dropout_mask(std::size_t rows, std::size_t cols, Real rate, Rng& rng) {
  if (!(rate >= Real{0} && rate < Real{1})) {
    throw std::invalid_argument("dropout: rate must lie in [0, 1)");
  }
  Matrix mask(rows, cols, Real{1});
  if (rate == Real{0}) return mask;
  const Real keep_scale = Real{1} / (Real{1} - rate);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Real& v : mask.values()) v = u(rng) < static_cast<double>(rate) ? Real{0} : keep_scale;
  return mask;
}

Matrix dropout(const Matrix& x, Real rate, Rng& rng, bool training) {
  if (!(rate >= Real{0} && rate < Real{1})) {
    throw std::invalid_argument("dropout: rate must lie in [0, 1)");
  }
  if (!training || rate == Real{0}) return x;
  return hadamard(x, dropout_mask(x.rows(), x.cols(), rate, rng));
}

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) throw std::runtime_error(std::string("forward_gcn: non-finite ") + what);
}

}  // namespace

GcnForward forward_gcn(const AdjacencyProvider& adjacency, const Matrix& x, const GcnParams& params,
                       const DropoutMasks* masks) {
  const auto& w1 = params.input_weights;
  const auto& w2 = params.output_weights;
  if (x.cols() != w1.rows() || w1.cols() != w2.rows()) {
    throw std::invalid_argument("forward_gcn: dimension mismatch (X " + std::to_string(x.rows()) + "x" +
                                std::to_string(x.cols()) + ", Theta1 " + std::to_string(w1.rows()) + "x" +
                                std::to_string(w1.cols()) + ", Theta2 " + std::to_string(w2.rows()) + "x" +
                                std::to_string(w2.cols()) + ")");
  }
  GcnForward f;
  auto& c = f.cache;

  c.adjacency[0] = adjacency(0, x, w1);
  c.input = masks ? hadamard(x, masks->input) : x;
  c.hidden_linear = spmm(*c.adjacency[0], matmul(c.input, w1));
  c.hidden = relu(c.hidden_linear);

  c.adjacency[1] = adjacency(1, c.hidden, w2);
  if (masks) {
    c.hidden_mask = masks->hidden;
    c.hidden_input = hadamard(c.hidden, masks->hidden);
  } else {
    c.hidden_input = c.hidden;
  }
  f.logits = spmm(*c.adjacency[1], matmul(c.hidden_input, w2));
  require_finite(f.logits, "logits");
  f.probs = softmax_rows(f.logits);
  return f;
}

GcnForward forward_gcn(const NormalizedAdjacency& adjacency, const Matrix& x, const GcnParams& params,
                       const DropoutMasks* masks) {
  // Non-owning: the cache must not outlive `adjacency`.
  AdjacencyPtr shared(std::shared_ptr<const NormalizedAdjacency>{}, &adjacency);
  return forward_gcn([&](int, const Matrix&, const Matrix&) { return shared; }, x, params, masks);
}

namespace {

void check_labelled(const Matrix& m, std::span<const Label> labels, std::span<const VertexId> labelled) {
  if (labelled.empty()) throw std::invalid_argument("loss: empty labelled set");
  for (VertexId v : labelled) {
    if (v >= m.rows() || v >= labels.size()) throw std::invalid_argument("loss: labelled vertex out of range");
    const Label y = labels[v];
    if (y < 0 || static_cast<std::size_t>(y) >= m.cols()) {
      throw std::invalid_argument("loss: label " + std::to_string(y) + " of vertex " + std::to_string(v) +
                                  " out of range");
    }
  }
}

}  // namespace

Real loss_ce(const Matrix& logits, std::span<const Label> labels, std::span<const VertexId> labelled,
             Reduction reduction) {
  check_labelled(logits, labels, labelled);
  Real total{0};
  for (VertexId v : labelled) {
    const auto row = logits.row(v);
    const Real m = *std::max_element(row.begin(), row.end());
    Real s{0};
    for (Real z : row) s += std::exp(z - m);
    total -= row[static_cast<std::size_t>(labels[v])] - m - std::log(s);
  }
  return reduction == Reduction::mean ? total / static_cast<Real>(labelled.size()) : total;
}

Matrix ce_logit_gradient(const Matrix& probs, std::span<const Label> labels, std::span<const VertexId> labelled,
                         Reduction reduction) {
  check_labelled(probs, labels, labelled);
  const Real scale = reduction == Reduction::mean ? Real{1} / static_cast<Real>(labelled.size()) : Real{1};
  Matrix grad(probs.rows(), probs.cols());
  for (VertexId v : labelled) {
    auto g = grad.row(v);
    const auto z = probs.row(v);
    for (std::size_t j = 0; j < z.size(); ++j) g[j] += scale * z[j];
    g[static_cast<std::size_t>(labels[v])] -= scale;
  }
  return grad;
}

GcnParams backward_gcn(const GcnCache& cache, const GcnParams& params, const Matrix& logit_grad) {
  GcnParams grads;
  // logits = A2 (H_d Theta2); A is symmetric so A^T = A.
  const Matrix d_hidden_proj = spmm(*cache.adjacency[1], logit_grad);
  grads.output_weights = matmul_tn(cache.hidden_input, d_hidden_proj);

  Matrix d_hidden = matmul_nt(d_hidden_proj, params.output_weights);
  if (!cache.hidden_mask.empty()) d_hidden = hadamard(d_hidden, cache.hidden_mask);
  auto dh = d_hidden.values();
  const auto pre = cache.hidden_linear.values();
  for (std::size_t i = 0; i < dh.size(); ++i) {
    if (!(pre[i] > Real{0})) dh[i] = Real{0};
  }
  const Matrix d_input_proj = spmm(*cache.adjacency[0], d_hidden);
  grads.input_weights = matmul_tn(cache.input, d_input_proj);
  return grads;
}

GcnParams backward_gcn(const GcnForward& fwd, const GcnParams& params, std::span<const Label> labels,
                       std::span<const VertexId> labelled, Reduction reduction) {
  return backward_gcn(fwd.cache, params, ce_logit_gradient(fwd.probs, labels, labelled, reduction));
}

}  // namespace hgcn
