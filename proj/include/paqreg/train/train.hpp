#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "paqreg/common.hpp"
#include "paqreg/models/nn.hpp"

namespace paqreg::train {

struct Metrics {
  double r2 = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
};

nlohmann::json to_json(const Metrics& m);

/// r2 = 1 - SSres/SStot, mae = mean |e|, rmse = sqrt(mean e^2).
/// Throws InputError on length mismatch, empty input or constant y_true.
Metrics compute_metrics(std::span<const double> y_true, std::span<const double> y_pred);

enum class OptimizerKind { Adam, Sgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double momentum = 0.0;  ///< sgd only
};

class Optimizer {
 public:
  Optimizer(const OptimizerConfig& cfg, double learning_rate, std::size_t n_params);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  OptimizerConfig cfg_;
  double lr_;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  std::size_t patience = 0;  ///< stop after this many epochs without a lower loss; 0 = never

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  static TrainConfig from_json(const nlohmann::json& j, TrainConfig defaults);
};

struct TrainResult {
  std::vector<double> loss_trace;  ///< mean squared error over each epoch's minibatches
  std::size_t epochs_run = 0;
};

/// Minibatch descent on mean squared error. Rows are reshuffled every epoch
/// from `cfg.seed`; per-sample gradients are computed in parallel and summed
/// in sample order, so the trace does not depend on the thread count.
/// Throws NumericError naming the epoch if the loss stops being finite.
TrainResult train_model(models::Differentiable& model, const Matrix& X, std::span<const double> y,
                        const TrainConfig& cfg);

}  // namespace paqreg::train
