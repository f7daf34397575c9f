#include <cmath>
#include <numbers>

#include "paqreg/models/nn.hpp"

namespace paqreg::models {

HybridModel::HybridModel(qsim::CircuitSpec circuit, std::size_t n_sub_encoders, double angle_scale)
    : circuit_(std::move(circuit)),
      n_sub_(n_sub_encoders),
      angle_scale_(angle_scale),
      head_(n_sub_encoders * circuit_.n_qubits) {
  if (n_sub_ < 1) throw InputError("hybrid: need at least one sub-encoder");
  if (!std::isfinite(angle_scale_) || angle_scale_ == 0.0) throw InputError("hybrid: angle_scale must be finite and non-zero");
  circuit_.validate();
  params_.assign(n_sub_ * circuit_.n_param_slots + head_.n_params(), 0.0);
}

std::span<double> HybridModel::sub_params(std::size_t k) {
  return std::span<double>(params_).subspan(k * circuit_.n_param_slots, circuit_.n_param_slots);
}
std::span<const double> HybridModel::sub_params(std::size_t k) const {
  return std::span<const double>(params_).subspan(k * circuit_.n_param_slots, circuit_.n_param_slots);
}
std::span<double> HybridModel::head_params() {
  return std::span<double>(params_).subspan(n_sub_ * circuit_.n_param_slots);
}
std::span<const double> HybridModel::head_params() const {
  return std::span<const double>(params_).subspan(n_sub_ * circuit_.n_param_slots);
}

void HybridModel::init(Rng& rng) {
  for (std::size_t k = 0; k < n_sub_; ++k)
    for (double& p : sub_params(k)) p = rng.uniform(-std::numbers::pi, std::numbers::pi);
  head_.init_into(head_params(), rng);
}

void HybridModel::check_input(std::span<const double> x) const {
  if (x.size() < input_dim())
    throw InputError("hybrid: input has " + std::to_string(x.size()) + " features, the sub-encoder slices need " +
                     std::to_string(input_dim()));
}

std::vector<double> HybridModel::angles(std::span<const double> x, std::size_t k) const {
  const std::size_t f = circuit_.n_feature_slots;
  std::vector<double> a(x.begin() + static_cast<std::ptrdiff_t>(k * f), x.begin() + static_cast<std::ptrdiff_t>((k + 1) * f));
  if (angle_scale_ != 1.0)
    for (double& v : a) v *= angle_scale_;
  return a;
}

std::vector<double> HybridModel::head_input(std::span<const double> x) const {
  check_input(x);
  std::vector<double> out;
  out.reserve(n_sub_ * circuit_.n_qubits);
  for (std::size_t k = 0; k < n_sub_; ++k) {
    const auto e = qsim::run_circuit(circuit_, angles(x, k), sub_params(k));
    out.insert(out.end(), e.values.begin(), e.values.end());
  }
  return out;
}

double HybridModel::forward(std::span<const double> x) const {
  const auto h = head_input(x);
  Mlp::Cache cache;
  return head_.forward_with(head_params(), h, cache);
}

double HybridModel::forward_backward_impl(std::span<const double> x, double target, bool upstream_is_given,
                                          double given_upstream, std::span<double> grad) const {
  check_input(x);
  const std::size_t nq = circuit_.n_qubits;
  std::vector<qsim::Statevector> states;
  states.reserve(n_sub_);
  std::vector<double> h;
  h.reserve(n_sub_ * nq);
  std::vector<std::vector<double>> enc;
  enc.reserve(n_sub_);
  for (std::size_t k = 0; k < n_sub_; ++k) {
    enc.push_back(angles(x, k));
    states.push_back(qsim::simulate(circuit_, enc.back(), sub_params(k)));
    const auto e = states.back().expectations_z();
    h.insert(h.end(), e.begin(), e.end());
  }
  Mlp::Cache cache;
  const double pred = head_.forward_with(head_params(), h, cache);
  const double upstream = upstream_is_given ? given_upstream : 2.0 * (pred - target);

  const std::size_t p = circuit_.n_param_slots;
  std::vector<double> dh(h.size(), 0.0);
  head_.backward_with(head_params(), cache, upstream, grad.subspan(n_sub_ * p), dh);
  for (std::size_t k = 0; k < n_sub_; ++k) {
    const auto vj = qsim::vjp_adjoint(circuit_, enc[k], sub_params(k), states[k],
                                      std::span<const double>(dh).subspan(k * nq, nq));
    for (std::size_t j = 0; j < p; ++j) grad[k * p + j] += vj.params[j];
  }
  return pred;
}

double HybridModel::forward_backward(std::span<const double> x, double target, std::span<double> grad) const {
  return forward_backward_impl(x, target, false, 0.0, grad);
}

HybridModel::Gradients HybridModel::backward(std::span<const double> x, double upstream) const {
  std::vector<double> flat(params_.size(), 0.0);
  forward_backward_impl(x, 0.0, true, upstream, flat);
  Gradients g;
  const std::size_t p = circuit_.n_param_slots;
  for (std::size_t k = 0; k < n_sub_; ++k) g.sub_params.emplace_back(flat.begin() + k * p, flat.begin() + (k + 1) * p);
  g.head.assign(flat.begin() + n_sub_ * p, flat.end());
  return g;
}

}  // namespace paqreg::models
