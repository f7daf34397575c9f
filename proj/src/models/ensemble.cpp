#include <algorithm>
#include <cmath>
#include <numeric>

#include "paqreg/models/trees.hpp"

namespace paqreg::models {

TreeEnsembleSpec TreeEnsembleSpec::gbdt_defaults() { return {}; }

TreeEnsembleSpec TreeEnsembleSpec::random_forest_defaults() {
  TreeEnsembleSpec s;
  s.mode = EnsembleMode::RandomForest;
  s.n_trees = 100;
  s.max_depth = 16;
  s.learning_rate = 1.0;
  s.feature_subsample = 1.0 / 3.0;
  return s;
}

nlohmann::json TreeEnsembleSpec::to_json() const {
  nlohmann::json j{{"kind", mode == EnsembleMode::Gbdt ? "gbdt" : "random_forest"},
                   {"n_trees", n_trees},
                   {"max_depth", max_depth},
                   {"min_samples_leaf", min_samples_leaf},
                   {"feature_subsample", feature_subsample},
                   {"seed", seed}};
  if (mode == EnsembleMode::Gbdt) j["learning_rate"] = learning_rate;
  return j;
}

TreeEnsembleSpec TreeEnsembleSpec::from_json(const nlohmann::json& j, EnsembleMode mode) {
  TreeEnsembleSpec s = mode == EnsembleMode::Gbdt ? gbdt_defaults() : random_forest_defaults();
  s.n_trees = j.value("n_trees", s.n_trees);
  s.max_depth = j.value("max_depth", s.max_depth);
  s.learning_rate = j.value("learning_rate", s.learning_rate);
  s.min_samples_leaf = j.value("min_samples_leaf", s.min_samples_leaf);
  s.feature_subsample = j.value("feature_subsample", s.feature_subsample);
  s.seed = j.value("seed", s.seed);
  if (s.n_trees < 1) throw InputError("tree ensemble: n_trees must be >= 1");
  if (s.min_samples_leaf < 1) throw InputError("tree ensemble: min_samples_leaf must be >= 1");
  if (!(s.feature_subsample > 0.0 && s.feature_subsample <= 1.0))
    throw InputError("tree ensemble: feature_subsample must be in (0, 1]");
  if (mode == EnsembleMode::Gbdt && !(s.learning_rate > 0.0)) throw InputError("gbdt: learning_rate must be > 0");
  return s;
}

TreeEnsemble::TreeEnsemble(TreeEnsembleSpec spec) : spec_(spec) {}

void TreeEnsemble::fit(const Matrix& X, std::span<const double> y) {
  if (X.rows < 2) throw InputError(kind() + ": need at least 2 rows");
  if (y.size() != X.rows) throw InputError(kind() + ": target length does not match rows");
  for (double v : y)
    if (!std::isfinite(v)) throw InputError(kind() + ": non-finite target");

  n_features_ = X.cols;
  trees_.clear();
  train_loss_.clear();
  const SortedColumns sorted(X);
  const std::size_t n = X.rows;

  TreeParams tp;
  tp.max_depth = spec_.max_depth;
  tp.min_samples_leaf = spec_.min_samples_leaf;
  const auto n_try = static_cast<std::size_t>(std::floor(static_cast<double>(X.cols) * spec_.feature_subsample));
  tp.max_features = std::max<std::size_t>(1, n_try);
  if (tp.max_features >= X.cols) tp.max_features = 0;

  if (spec_.mode == EnsembleMode::Gbdt) {
    // A constant target keeps its exact value instead of a rounded mean.
    const bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    base_ = constant ? y[0] : mean(y);
    std::vector<double> pred(n, base_), resid(n);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    auto mse = [&] {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (y[i] - pred[i]) * (y[i] - pred[i]);
      return s / static_cast<double>(n);
    };
    train_loss_.push_back(mse());
    Rng rng(spec_.seed);
    trees_.reserve(spec_.n_trees);
    for (std::size_t t = 0; t < spec_.n_trees; ++t) {
      for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - pred[i];
      trees_.push_back(RegressionTree::fit(X, resid, all, sorted, tp, rng));
      for (std::size_t i = 0; i < n; ++i) pred[i] += spec_.learning_rate * trees_.back().predict(X.row(i));
      train_loss_.push_back(mse());
    }
    return;
  }

  base_ = 0.0;
  trees_.resize(spec_.n_trees);
  const auto n_trees = static_cast<std::ptrdiff_t>(spec_.n_trees);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < n_trees; ++t) {
    Rng rng(mix_seed(spec_.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> boot(n);
    for (auto& b : boot) b = rng.below(n);
    trees_[static_cast<std::size_t>(t)] = RegressionTree::fit(X, y, boot, sorted, tp, rng);
  }
}

double TreeEnsemble::predict_one(std::span<const double> x) const {
  if (trees_.empty()) throw InputError(kind() + ": model is not fitted");
  if (x.size() != n_features_)
    throw InputError(kind() + ": expected " + std::to_string(n_features_) + " features, got " +
                     std::to_string(x.size()));
  if (spec_.mode == EnsembleMode::Gbdt) {
    double s = 0.0;
    for (const auto& t : trees_) s += t.predict(x);
    return base_ + spec_.learning_rate * s;
  }
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict(x);
  return s / static_cast<double>(trees_.size());
}

std::vector<double> TreeEnsemble::predict(const Matrix& X) const {
  std::vector<double> out(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) out[i] = predict_one(X.row(i));
  return out;
}

std::vector<double> TreeEnsemble::feature_importance() const {
  std::vector<double> imp(n_features_, 0.0);
  for (const auto& t : trees_) t.add_importance(imp);
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (total > 0.0)
    for (double& v : imp) v /= total;
  return imp;
}

nlohmann::json TreeEnsemble::params_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"n_features", n_features_}, {"base_prediction", base_}, {"trees", std::move(trees)}};
}

void TreeEnsemble::load_params(const nlohmann::json& j) {
  n_features_ = j.at("n_features").get<std::size_t>();
  base_ = j.at("base_prediction").get<double>();
  trees_.clear();
  for (const auto& t : j.at("trees")) trees_.push_back(RegressionTree::from_json(t));
  train_loss_.clear();
}

}  // namespace paqreg::models
