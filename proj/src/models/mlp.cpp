#include <algorithm>
#include <cmath>

#include "paqreg/models/nn.hpp"

namespace paqreg::models {

std::array<std::size_t, 4> mlp_layer_widths(std::size_t d) { return {d, d / 2, d / 4, 1}; }

std::size_t mlp_param_count(std::size_t d) {
  const auto w = mlp_layer_widths(d);
  std::size_t n = 0;
  for (std::size_t l = 0; l < 3; ++l) n += w[l] * w[l + 1] + w[l + 1];
  return n;
}

std::size_t hybrid_param_count(std::size_t n_qubits, std::size_t n_sub_encoders, std::size_t params_per_circuit) {
  if (n_qubits < 1 || n_sub_encoders < 1 || params_per_circuit < 1)
    throw InputError("hybrid_param_count: all arguments must be >= 1");
  return n_sub_encoders * params_per_circuit + mlp_param_count(n_sub_encoders * n_qubits);
}

Mlp::Mlp(std::size_t input_dim) : widths_(mlp_layer_widths(input_dim)) {
  if (input_dim < 4) throw InputError("mlp: input dimension must be at least 4 so every layer has width >= 1");
  std::size_t off = 0;
  for (std::size_t l = 0; l < 3; ++l) {
    offsets_[l] = off;
    off += widths_[l] * widths_[l + 1] + widths_[l + 1];
  }
  params_.assign(off, 0.0);
}

void Mlp::init_into(std::span<double> p, Rng& rng) const {
  for (std::size_t l = 0; l < 3; ++l) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    double* w = p.data() + offsets_[l];
    for (std::size_t i = 0; i < in * out; ++i) w[i] = rng.uniform(-bound, bound);
    std::fill(w + in * out, w + in * out + out, 0.0);
  }
}

void Mlp::init(Rng& rng) { init_into(params_, rng); }

double Mlp::forward_with(std::span<const double> p, std::span<const double> x, Cache& cache) const {
  if (x.size() != widths_[0])
    throw InputError("mlp: expected input of length " + std::to_string(widths_[0]) + ", got " +
                     std::to_string(x.size()));
  cache.act[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < 3; ++l) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    const double* w = p.data() + offsets_[l];
    const double* b = w + in * out;
    const auto& a = cache.act[l];
    auto& z = cache.act[l + 1];
    z.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) s += wr[i] * a[i];
      z[o] = (l < 2) ? std::max(0.0, s) : s;
    }
  }
  return cache.act[3][0];
}

void Mlp::backward_with(std::span<const double> p, const Cache& cache, double upstream,
                        std::span<double> grad_params, std::span<double> grad_input) const {
  std::vector<double> delta{upstream};
  for (std::size_t l = 3; l-- > 0;) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    const double* w = p.data() + offsets_[l];
    double* gw = grad_params.data() + offsets_[l];
    double* gb = gw + in * out;
    const auto& a = cache.act[l];
    for (std::size_t o = 0; o < out; ++o) {
      gb[o] += delta[o];
      double* gwr = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) gwr[i] += delta[o] * a[i];
    }
    if (l == 0 && grad_input.empty()) break;
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += wr[i] * delta[o];
    }
    if (l > 0) {
      // Layer l's input went through a ReLU; zero output means zero slope.
      for (std::size_t i = 0; i < in; ++i)
        if (a[i] <= 0.0) prev[i] = 0.0;
    } else {
      std::copy(prev.begin(), prev.end(), grad_input.begin());
    }
    delta = std::move(prev);
  }
}

double Mlp::forward(std::span<const double> x) const {
  Cache cache;
  return forward_with(params_, x, cache);
}

double Mlp::forward(std::span<const double> x, Cache& cache) const { return forward_with(params_, x, cache); }

void Mlp::backward(const Cache& cache, double upstream, std::span<double> grad_params,
                   std::span<double> grad_input) const {
  backward_with(params_, cache, upstream, grad_params, grad_input);
}

double Mlp::forward_backward(std::span<const double> x, double target, std::span<double> grad) const {
  Cache cache;
  const double pred = forward_with(params_, x, cache);
  backward_with(params_, cache, 2.0 * (pred - target), grad, {});
  return pred;
}

}  // namespace paqreg::models
