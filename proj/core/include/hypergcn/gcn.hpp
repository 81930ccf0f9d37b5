#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>

#include "hypergcn/expand.hpp"
#include "hypergcn/matrix.hpp"
#include "hypergcn/random.hpp"

namespace hgcn {

using Label = int;

/// Sparse-dense product A * X.
Matrix spmm(const NormalizedAdjacency& a, const Matrix& x);

Matrix relu(const Matrix& x);
Matrix sigmoid(const Matrix& x);
/// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);
Matrix log_softmax_rows(const Matrix& logits);
/// Pulls a gradient w.r.t. softmax outputs back to the logits.
Matrix softmax_backward(const Matrix& probs, const Matrix& grad_probs);

/// Uniform in +-sqrt(6 / (rows + cols)).
Matrix glorot_init(std::size_t rows, std::size_t cols, Rng& rng);

/// Inverted-dropout mask: each entry is 0 with probability `rate`, otherwise
/// 1 / (1 - rate). Throws std::invalid_argument unless 0 <= rate < 1.
Matrix dropout_mask(std::size_t rows, std::size_t cols, Real rate, Rng& rng);

/// x itself when not training; otherwise x scaled by a fresh dropout mask.
Matrix dropout(const Matrix& x, Real rate, Rng& rng, bool training);

/// Weights of the two-layer network: input-to-hidden (p x h) and
/// hidden-to-output (h x q).
struct GcnParams {
  Matrix input_weights;
  Matrix output_weights;
};

/// Dropout masks for the inputs of the two layers. Absent masks mean
/// evaluation mode.
struct DropoutMasks {
  Matrix input;
  Matrix hidden;
};

using AdjacencyPtr = std::shared_ptr<const NormalizedAdjacency>;

/// Supplies the propagation matrix of a layer (0 or 1) from that layer's input
/// before dropout and its current weights. Static methods ignore both.
using AdjacencyProvider = std::function<AdjacencyPtr(int layer, const Matrix& input, const Matrix& weights)>;

/// Intermediates kept by the forward pass for backpropagation.
struct GcnCache {
  std::array<AdjacencyPtr, 2> adjacency;
  Matrix input;          // X after dropout
  Matrix hidden_linear;  // A1 X Theta1
  Matrix hidden;         // ReLU(A1 X Theta1)
  Matrix hidden_input;   // hidden after dropout
  Matrix hidden_mask;    // empty in evaluation mode
};

struct GcnForward {
  Matrix logits;  // A2 H Theta2
  Matrix probs;   // softmax_rows(logits)
  GcnCache cache;
};

/// Z = softmax(A2 ReLU(A1 X Theta1) Theta2).
///
/// Throws std::invalid_argument on a shape mismatch and std::runtime_error if
/// the output is not finite.
GcnForward forward_gcn(const AdjacencyProvider& adjacency, const Matrix& x, const GcnParams& params,
                       const DropoutMasks* masks = nullptr);
GcnForward forward_gcn(const NormalizedAdjacency& adjacency, const Matrix& x, const GcnParams& params,
                       const DropoutMasks* masks = nullptr);

enum class Reduction { mean, sum };

/// Cross-entropy of the labelled rows computed from logits through log-softmax.
/// `labelled` may repeat vertices; each occurrence counts. Mean reduction
/// divides by labelled.size(). Throws std::invalid_argument if labelled is
/// empty or a label is out of range.
Real loss_ce(const Matrix& logits, std::span<const Label> labels, std::span<const VertexId> labelled,
             Reduction reduction = Reduction::mean);

/// d loss_ce / d logits = (Z - Y) on labelled rows, scaled like the loss.
Matrix ce_logit_gradient(const Matrix& probs, std::span<const Label> labels, std::span<const VertexId> labelled,
                         Reduction reduction = Reduction::mean);

/// Gradients of a scalar loss with respect to both weight matrices, given the
/// loss gradient at the logits. Adjacency matrices are treated as constants.
GcnParams backward_gcn(const GcnCache& cache, const GcnParams& params, const Matrix& logit_grad);

/// Gradients of loss_ce composed with forward_gcn.
GcnParams backward_gcn(const GcnForward& fwd, const GcnParams& params, std::span<const Label> labels,
                       std::span<const VertexId> labelled, Reduction reduction = Reduction::mean);

}  // namespace hgcn
