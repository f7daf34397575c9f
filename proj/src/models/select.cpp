#include <algorithm>
#include <cmath>
#include <numeric>

#include "paqreg/models/select.hpp"
#include "paqreg/models/trees.hpp"
#include "paqreg/train/cv.hpp"

namespace paqreg::models {

nlohmann::json SelectionResult::to_json(const std::vector<std::string>& names) const {
  nlohmann::json ranked = nlohmann::json::array();
  for (auto c : ranking) ranked.push_back({{"column", names.at(c)}, {"importance", importance.at(c)}});
  nlohmann::json kept = nlohmann::json::array();
  for (auto c : retained) kept.push_back(names.at(c));
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : trace) {
    nlohmann::json dropped = nlohmann::json::array();
    for (auto c : s.dropped) dropped.push_back(names.at(c));
    steps.push_back({{"n_features", s.n_features}, {"mae", s.mae}, {"dropped", std::move(dropped)}});
  }
  return {{"ranking", std::move(ranked)},
          {"retained", std::move(kept)},
          {"best_mae", best_mae},
          {"trace", std::move(steps)}};
}

SelectionResult select_features(const ingest::FeatureMatrix& X, std::span<const double> y,
                                const SelectionOptions& options) {
  if (X.n_cols() < 2) throw InputError("select: need at least 2 features");
  if (options.step < 1) throw InputError("select: step must be >= 1");
  if (!(options.tolerance >= 0.0)) throw InputError("select: tolerance must be >= 0");

  ModelFactory importance_model = options.importance_model;
  if (!importance_model) {
    const auto seed = options.seed;
    importance_model = [seed] {
      auto s = TreeEnsembleSpec::gbdt_defaults();
      s.seed = seed;
      return std::make_unique<TreeEnsemble>(s);
    };
  }
  const ModelFactory eval_model = options.eval_model ? options.eval_model : importance_model;

  SelectionResult res;
  {
    auto probe = importance_model();
    auto* ens = dynamic_cast<TreeEnsemble*>(probe.get());
    if (!ens) throw InputError("select: importance model must be a tree ensemble");
    ens->fit(X.values, y);
    res.importance = ens->feature_importance();
  }
  res.ranking.resize(X.n_cols());
  std::iota(res.ranking.begin(), res.ranking.end(), 0);
  std::stable_sort(res.ranking.begin(), res.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return res.importance[a] > res.importance[b]; });

  const auto plan = ingest::make_folds(X.n_rows(), options.n_folds, options.n_iterations, options.seed);
  auto score = [&](std::size_t k) {
    std::vector<std::size_t> cols(res.ranking.begin(), res.ranking.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(cols.begin(), cols.end());
    return train::cross_validate(eval_model, X.select_columns(cols), y, plan).mae.mean;
  };

  std::size_t k = X.n_cols();
  res.best_mae = score(k);
  res.trace.push_back({k, res.best_mae, {}});
  std::size_t accepted = k;
  while (k > 1) {
    const std::size_t next = k > options.step ? k - options.step : 1;
    const double mae = score(next);
    SelectionStep st{next, mae, {}};
    st.dropped.assign(res.ranking.begin() + static_cast<std::ptrdiff_t>(next),
                      res.ranking.begin() + static_cast<std::ptrdiff_t>(k));
    res.trace.push_back(std::move(st));
    k = next;
    if (mae > res.best_mae * (1.0 + options.tolerance)) break;
    accepted = k;
    res.best_mae = std::min(res.best_mae, mae);
  }
  res.retained.assign(res.ranking.begin(), res.ranking.begin() + static_cast<std::ptrdiff_t>(accepted));
  return res;
}

}  // namespace paqreg::models
