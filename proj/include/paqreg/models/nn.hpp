#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "paqreg/common.hpp"
#include "paqreg/qsim/qsim.hpp"

namespace paqreg::models {

/// A scalar-output model with a flat parameter vector, trainable by
/// first-order optimisers.
class Differentiable {
 public:
  virtual ~Differentiable() = default;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t n_params() const = 0;
  virtual std::span<double> params() = 0;
  virtual std::span<const double> params() const = 0;
  virtual double forward(std::span<const double> x) const = 0;
  /// Returns the prediction and adds d(prediction - target)^2 / d(params) to
  /// `grad`. Safe to call concurrently with distinct `grad` buffers.
  virtual double forward_backward(std::span<const double> x, double target, std::span<double> grad) const = 0;
};

/// Widths {d, d/2, d/4, 1} (integer division).
std::array<std::size_t, 4> mlp_layer_widths(std::size_t input_dim);
std::size_t mlp_param_count(std::size_t input_dim);
/// K * params_per_circuit + mlp_param_count(K * n_qubits)
std::size_t hybrid_param_count(std::size_t n_qubits, std::size_t n_sub_encoders, std::size_t params_per_circuit);

/// Three dense layers with ReLU between them and a linear scalar output.
/// Parameters are stored per layer as the weight matrix (out x in, row-major)
/// followed by the bias.
class Mlp : public Differentiable {
 public:
  struct Cache {
    std::array<std::vector<double>, 4> act;  ///< layer inputs/outputs, post-activation
  };

  explicit Mlp(std::size_t input_dim);

  std::size_t input_dim() const override { return widths_[0]; }
  std::size_t n_params() const override { return params_.size(); }
  std::span<double> params() override { return params_; }
  std::span<const double> params() const override { return params_; }
  const std::array<std::size_t, 4>& widths() const { return widths_; }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  void init(Rng& rng);

  double forward(std::span<const double> x) const override;
  double forward(std::span<const double> x, Cache& cache) const;
  /// grad_params += upstream * d out / d params; grad_input (if non-empty)
  /// receives upstream * d out / d x.
  void backward(const Cache& cache, double upstream, std::span<double> grad_params,
                std::span<double> grad_input) const;
  double forward_backward(std::span<const double> x, double target, std::span<double> grad) const override;

  /// The same computations against an external parameter block laid out like
  /// params(); used by models that embed an MLP head.
  double forward_with(std::span<const double> p, std::span<const double> x, Cache& cache) const;
  void backward_with(std::span<const double> p, const Cache& cache, double upstream, std::span<double> grad_params,
                     std::span<double> grad_input) const;
  void init_into(std::span<double> p, Rng& rng) const;

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

 private:
  std::array<std::size_t, 4> widths_;
  std::array<std::size_t, 3> offsets_;
  std::vector<double> params_;
};

/// K sub-encoders sharing one circuit topology, each with its own parameters
/// and its own contiguous slice of the input, feeding an MLP head. Encoding
/// angles are angle_scale * x; 1.0 is raw angle encoding.
class HybridModel : public Differentiable {
 public:
  HybridModel(qsim::CircuitSpec circuit, std::size_t n_sub_encoders, double angle_scale = 1.0);

  const qsim::CircuitSpec& circuit() const { return circuit_; }
  std::size_t n_sub_encoders() const { return n_sub_; }
  std::size_t features_per_circuit() const { return circuit_.n_feature_slots; }
  std::size_t params_per_circuit() const { return circuit_.n_param_slots; }
  double angle_scale() const { return angle_scale_; }

  std::size_t input_dim() const override { return n_sub_ * circuit_.n_feature_slots; }
  std::size_t n_params() const override { return params_.size(); }
  std::span<double> params() override { return params_; }
  std::span<const double> params() const override { return params_; }

  std::span<double> sub_params(std::size_t k);
  std::span<const double> sub_params(std::size_t k) const;
  std::span<double> head_params();
  std::span<const double> head_params() const;
  const Mlp& head() const { return head_; }

  /// Sub-encoder angles uniform(-pi, pi); head as Mlp::init.
  void init(Rng& rng);

  /// Concatenated <Z> readouts of the K circuits, sub-encoder order.
  std::vector<double> head_input(std::span<const double> x) const;
  double forward(std::span<const double> x) const override;

  struct Gradients {
    std::vector<std::vector<double>> sub_params;  ///< K x params_per_circuit
    std::vector<double> head;
  };
  Gradients backward(std::span<const double> x, double upstream) const;
  double forward_backward(std::span<const double> x, double target, std::span<double> grad) const override;

 private:
  void check_input(std::span<const double> x) const;
  std::vector<double> angles(std::span<const double> x, std::size_t k) const;
  double forward_backward_impl(std::span<const double> x, double target, bool upstream_is_given,
                               double given_upstream, std::span<double> grad) const;

  qsim::CircuitSpec circuit_;
  std::size_t n_sub_;
  double angle_scale_;
  std::vector<double> params_;  ///< [K * params_per_circuit | head]
  Mlp head_;                    ///< layout only; weights live in params_
};

}  // namespace paqreg::models
