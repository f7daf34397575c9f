#pragma once

#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "paqreg/ingest.hpp"
#include "paqreg/models/regressor.hpp"

namespace paqreg::models {

struct SelectionOptions {
  double tolerance = 0.02;  ///< relative MAE increase over the best seen that stops the search
  std::size_t step = 1;     ///< features dropped per round
  std::size_t n_folds = 5;
  std::size_t n_iterations = 1;
  std::uint64_t seed = 0;
  ModelFactory importance_model;  ///< must yield a TreeEnsemble; default gbdt
  ModelFactory eval_model;        ///< default: same as importance_model
};

struct SelectionStep {
  std::size_t n_features = 0;
  double mae = 0.0;
  std::vector<std::size_t> dropped;  ///< columns removed to reach this step
};

struct SelectionResult {
  std::vector<std::size_t> ranking;  ///< column indices, most important first
  std::vector<double> importance;    ///< per input column
  std::vector<std::size_t> retained; ///< prefix of `ranking`
  std::vector<SelectionStep> trace;
  double best_mae = 0.0;

  nlohmann::json to_json(const std::vector<std::string>& names) const;
};

/// Ranks columns by tree importance, then drops the lowest ranked `step`
/// columns at a time, scoring each remaining set by CV MAE. Stops at the first
/// set whose MAE exceeds best * (1 + tolerance) and returns the last set that
/// stayed within it. With tolerance = inf it runs down to one column.
SelectionResult select_features(const ingest::FeatureMatrix& X, std::span<const double> y,
                                const SelectionOptions& options = {});

}  // namespace paqreg::models
