#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hypergcn/gcn.hpp"
#include "hypergcn/matrix.hpp"

namespace hgcn {

enum class WeightDecay {
  decoupled,  // theta -= lr * wd * theta beside the adaptive step
  l2,         // wd * theta added to the gradient before the moment updates
};

struct AdamConfig {
  Real learning_rate = Real(0.01);
  Real weight_decay = Real(5e-4);
  Real beta1 = Real(0.9);
  Real beta2 = Real(0.999);
  Real epsilon = Real(1e-8);
  WeightDecay decay_mode = WeightDecay::decoupled;
};

struct OptimizerState {
  AdamConfig config;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step = 0;

  OptimizerState() = default;
  explicit OptimizerState(AdamConfig cfg) : config(cfg) {}
};

/// One Adam update. With decoupled decay
///   theta -= lr * (m_hat / (sqrt(v_hat) + eps)) + lr * wd * theta
/// and with l2 decay the gradient becomes g + wd * theta. Decay applies only to
/// parameters flagged in `decayed`.
/// Moments are allocated lazily on the first step.
void adam_step(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
               std::span<const bool> decayed, OptimizerState& state);

/// Decays the input-to-hidden weights only.
void adam_step(GcnParams& params, const GcnParams& grads, OptimizerState& state);

}  // namespace hgcn
