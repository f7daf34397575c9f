#include "paqreg/train/neural.hpp"

namespace paqreg::train {

NeuralRegressor::NeuralRegressor(TrainConfig cfg) : cfg_(cfg) {}

NeuralRegressor::NeuralRegressor(HybridShape shape, TrainConfig cfg) : hybrid_(shape), cfg_(cfg) {
  if (shape.n_qubits < 1 || shape.n_qubits > 16) throw InputError("hybrid: n_qubits must be in 1..16");
  if (shape.n_sub_encoders < 1 || shape.features_per_circuit < 1 || shape.params_per_circuit < 1)
    throw InputError("hybrid: sub-encoders, features and parameters per circuit must be >= 1");
}

std::unique_ptr<models::Differentiable> NeuralRegressor::build(std::size_t n_cols) const {
  if (!hybrid_) return std::make_unique<models::Mlp>(n_cols);
  const auto& h = *hybrid_;
  if (n_cols < h.n_sub_encoders * h.features_per_circuit)
    throw InputError("hybrid: " + std::to_string(h.n_sub_encoders) + " sub-encoders x " +
                     std::to_string(h.features_per_circuit) + " features need that many columns, got " +
                     std::to_string(n_cols));
  auto circuit = qsim::generate_circuit(h.n_qubits, h.features_per_circuit, h.params_per_circuit, h.circuit_seed);
  return std::make_unique<models::HybridModel>(std::move(circuit), h.n_sub_encoders, h.angle_scale);
}

void NeuralRegressor::fit(const Matrix& X, std::span<const double> y) {
  if (X.rows < 2) throw InputError(kind() + ": need at least 2 rows");
  net_ = build(X.cols);
  y_mean_ = mean(y);
  y_std_ = pstdev(y);
  if (!(y_std_ > 0.0)) y_std_ = 1.0;
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = (y[i] - y_mean_) / y_std_;

  Rng rng(mix_seed(cfg_.seed, 0x1417));
  if (auto* m = dynamic_cast<models::Mlp*>(net_.get()))
    m->init(rng);
  else
    static_cast<models::HybridModel*>(net_.get())->init(rng);
  result_ = train_model(*net_, X, z, cfg_);
}

std::vector<double> NeuralRegressor::predict(const Matrix& X) const {
  if (!net_) throw InputError(kind() + ": model is not fitted");
  const std::size_t need = net_->input_dim();
  if (hybrid_ ? X.cols < need : X.cols != need)
    throw InputError(kind() + ": expected " + std::to_string(need) + " feature columns, got " +
                     std::to_string(X.cols));
  std::vector<double> out(X.rows);
  const auto rows = static_cast<std::ptrdiff_t>(X.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    out[r] = y_mean_ + y_std_ * net_->forward(X.row(r));
  }
  return out;
}

nlohmann::json NeuralRegressor::spec_json() const {
  nlohmann::json j{{"kind", kind()}, {"train", cfg_.to_json()}};
  if (hybrid_) {
    j["n_qubits"] = hybrid_->n_qubits;
    j["n_sub_encoders"] = hybrid_->n_sub_encoders;
    j["features_per_qc"] = hybrid_->features_per_circuit;
    j["params_per_qc"] = hybrid_->params_per_circuit;
    j["circuit_seed"] = hybrid_->circuit_seed;
    j["angle_scale"] = hybrid_->angle_scale;
  }
  return j;
}

nlohmann::json NeuralRegressor::params_json() const {
  if (!net_) throw InputError(kind() + ": model is not fitted");
  auto p = net_->params();
  nlohmann::json j{{"input_dim", net_->input_dim()},
                   {"y_mean", y_mean_},
                   {"y_std", y_std_},
                   {"weights", std::vector<double>(p.begin(), p.end())}};
  if (const auto* h = dynamic_cast<const models::HybridModel*>(net_.get())) j["circuit"] = qsim::to_json(h->circuit());
  return j;
}

void NeuralRegressor::load_params(const nlohmann::json& j) {
  const auto dim = j.at("input_dim").get<std::size_t>();
  if (hybrid_) {
    auto circuit = qsim::circuit_from_json(j.at("circuit"));
    net_ = std::make_unique<models::HybridModel>(std::move(circuit), hybrid_->n_sub_encoders, hybrid_->angle_scale);
    if (net_->input_dim() != dim) throw InputError("hybrid: checkpoint input_dim does not match its circuit");
  } else {
    net_ = std::make_unique<models::Mlp>(dim);
  }
  const auto w = j.at("weights").get<std::vector<double>>();
  if (w.size() != net_->n_params())
    throw InputError(kind() + ": checkpoint has " + std::to_string(w.size()) + " weights, model needs " +
                     std::to_string(net_->n_params()));
  std::copy(w.begin(), w.end(), net_->params().begin());
  y_mean_ = j.at("y_mean").get<double>();
  y_std_ = j.at("y_std").get<double>();
  result_ = {};
}

}  // namespace paqreg::train
