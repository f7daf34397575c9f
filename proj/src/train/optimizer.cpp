#include <cmath>

#include "paqreg/train/train.hpp"

namespace paqreg::train {

Optimizer::Optimizer(const OptimizerConfig& cfg, double learning_rate, std::size_t n_params)
    : cfg_(cfg), lr_(learning_rate), m_(n_params, 0.0), v_(cfg.kind == OptimizerKind::Adam ? n_params : 0, 0.0) {
  if (!(learning_rate >= 0.0)) throw InputError("optimizer: learning rate must be >= 0");
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw InputError("optimizer: parameter/gradient size mismatch");
  ++t_;
  if (cfg_.kind == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = cfg_.momentum * m_[i] + grad[i];
      params[i] -= lr_ * m_[i];
    }
    return;
  }
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

}  // namespace paqreg::train
