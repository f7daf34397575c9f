#pragma once

#include <memory>
#include <optional>

#include "paqreg/models/regressor.hpp"
#include "paqreg/train/train.hpp"

namespace paqreg::train {

struct HybridShape {
  unsigned n_qubits = 8;
  std::size_t n_sub_encoders = 4;
  std::size_t features_per_circuit = 16;
  std::size_t params_per_circuit = 40;
  std::uint64_t circuit_seed = 0;
  double angle_scale = 1.0;  ///< encoding angle = angle_scale * feature
};

/// Regressor adapter around Mlp or HybridModel. Targets are standardised
/// with the training mean and std before fitting and mapped back on predict.
class NeuralRegressor : public models::Regressor {
 public:
  /// MLP over all input columns.
  explicit NeuralRegressor(TrainConfig cfg);
  /// Hybrid model reading the first K * features_per_circuit columns.
  NeuralRegressor(HybridShape shape, TrainConfig cfg);

  std::string kind() const override { return hybrid_ ? "hybrid" : "mlp"; }
  void fit(const Matrix& X, std::span<const double> y) override;
  std::vector<double> predict(const Matrix& X) const override;

  nlohmann::json spec_json() const override;
  nlohmann::json params_json() const override;
  void load_params(const nlohmann::json& j) override;

  const TrainResult& train_result() const { return result_; }
  const models::Differentiable* network() const { return net_.get(); }

 private:
  std::unique_ptr<models::Differentiable> build(std::size_t n_cols) const;

  std::optional<HybridShape> hybrid_;
  TrainConfig cfg_;
  std::unique_ptr<models::Differentiable> net_;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  TrainResult result_;
};

}  // namespace paqreg::train
