#include "hypergcn/optimizer.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace hgcn {

void adam_step(std::span<Matrix* const> params, std::span<const Matrix* const> grads, std::span<const bool> decayed,
               OptimizerState& state) {
  if (params.size() != grads.size() || params.size() != decayed.size()) {
    throw std::invalid_argument("adam_step: parameter, gradient and decay lists differ in length");
  }
  if (state.first_moment.empty()) {
    for (const Matrix* p : params) {
      state.first_moment.emplace_back(p->rows(), p->cols());
      state.second_moment.emplace_back(p->rows(), p->cols());
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimizer state tracks a different parameter set");
  }
  const auto& cfg = state.config;
  ++state.step;
  const Real t = static_cast<Real>(state.step);
  const Real bias1 = Real{1} - std::pow(cfg.beta1, t);
  const Real bias2 = Real{1} - std::pow(cfg.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    require_same_shape(p, g, "adam_step");
    require_same_shape(p, state.first_moment[i], "adam_step");
    auto pv = p.values();
    const auto gv = g.values();
    auto mv = state.first_moment[i].values();
    auto vv = state.second_moment[i].values();
    const bool coupled = cfg.decay_mode == WeightDecay::l2;
    const Real wd = decayed[i] ? cfg.weight_decay : Real{0};
    const Real decay = coupled ? Real{0} : cfg.learning_rate * wd;
    for (std::size_t k = 0; k < pv.size(); ++k) {
      const Real grad = coupled ? gv[k] + wd * pv[k] : gv[k];
      mv[k] = cfg.beta1 * mv[k] + (Real{1} - cfg.beta1) * grad;
      vv[k] = cfg.beta2 * vv[k] + (Real{1} - cfg.beta2) * grad * grad;
      const Real m_hat = mv[k] / bias1;
      const Real v_hat = vv[k] / bias2;
      pv[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon) + decay * pv[k];
    }
  }
}

void adam_step(GcnParams& params, const GcnParams& grads, OptimizerState& state) {
  const std::array<Matrix*, 2> p{&params.input_weights, &params.output_weights};
  const std::array<const Matrix*, 2> g{&grads.input_weights, &grads.output_weights};
  const std::array<bool, 2> decayed{true, false};
  adam_step(p, g, decayed, state);
}

}  // namespace hgcn
