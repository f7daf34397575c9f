#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "paqreg/train/train.hpp"

namespace paqreg::train {

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json opt;
  if (optimizer.kind == OptimizerKind::Adam)
    opt = {{"kind", "adam"}, {"beta1", optimizer.beta1}, {"beta2", optimizer.beta2}, {"eps", optimizer.eps}};
  else
    opt = {{"kind", "sgd"}, {"momentum", optimizer.momentum}};
  return {{"epochs", epochs},       {"batch_size", batch_size}, {"learning_rate", learning_rate},
          {"optimizer", opt},       {"seed", seed},             {"patience", patience}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) { return from_json(j, TrainConfig{}); }

TrainConfig TrainConfig::from_json(const nlohmann::json& j, TrainConfig c) {
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.seed = j.value("seed", c.seed);
  c.patience = j.value("patience", c.patience);
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    const std::string kind = o.is_string() ? o.get<std::string>() : o.value("kind", std::string("adam"));
    if (kind == "adam")
      c.optimizer.kind = OptimizerKind::Adam;
    else if (kind == "sgd")
      c.optimizer.kind = OptimizerKind::Sgd;
    else
      throw InputError("train: unknown optimizer '" + kind + "'");
    if (o.is_object()) {
      c.optimizer.beta1 = o.value("beta1", c.optimizer.beta1);
      c.optimizer.beta2 = o.value("beta2", c.optimizer.beta2);
      c.optimizer.eps = o.value("eps", c.optimizer.eps);
      c.optimizer.momentum = o.value("momentum", c.optimizer.momentum);
    }
  }
  if (c.batch_size < 1) throw InputError("train: batch_size must be >= 1");
  if (!(c.learning_rate >= 0.0)) throw InputError("train: learning_rate must be >= 0");
  return c;
}

TrainResult train_model(models::Differentiable& model, const Matrix& X, std::span<const double> y,
                        const TrainConfig& cfg) {
  if (X.rows == 0) throw InputError("train: no rows");
  if (y.size() != X.rows) throw InputError("train: target length does not match rows");
  if (cfg.batch_size < 1) throw InputError("train: batch_size must be >= 1");

  const std::size_t n = X.rows;
  const std::size_t np = model.n_params();
  const std::size_t bs = std::min(cfg.batch_size, n);
  Optimizer opt(cfg.optimizer, cfg.learning_rate, np);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  // One gradient slot per sample in the batch; summed in sample order below.
  std::vector<double> slots(bs * np);
  std::vector<double> sq_err(bs);
  std::vector<double> grad(np);

  TrainResult result;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_sum = 0.0;
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t m = std::min(bs, n - start);
      std::fill(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(m * np), 0.0);
      std::exception_ptr failure;
      const auto& net = model;
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(m); ++s) {
        try {
          const std::size_t row = order[start + static_cast<std::size_t>(s)];
          const double pred =
              net.forward_backward(X.row(row), y[row], std::span<double>(slots).subspan(static_cast<std::size_t>(s) * np, np));
          sq_err[static_cast<std::size_t>(s)] = (pred - y[row]) * (pred - y[row]);
        } catch (...) {
#pragma omp critical
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);

      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t s = 0; s < m; ++s) {
        epoch_sum += sq_err[s];
        const double* g = slots.data() + s * np;
        for (std::size_t k = 0; k < np; ++k) grad[k] += g[k];
      }
      const double inv = 1.0 / static_cast<double>(m);
      for (double& g : grad) g *= inv;
      opt.step(model.params(), grad);
    }
    const double loss = epoch_sum / static_cast<double>(n);
    if (!std::isfinite(loss)) throw NumericError("train: loss became non-finite at epoch " + std::to_string(epoch + 1));
    result.loss_trace.push_back(loss);
    result.epochs_run = epoch + 1;
    if (cfg.patience > 0) {
      if (loss < best) {
        best = loss;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        break;
      }
    }
  }
  for (double p : model.params())
    if (!std::isfinite(p)) throw NumericError("train: parameters became non-finite");
  return result;
}

}  // namespace paqreg::train
