#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "paqreg/ingest.hpp"
#include "paqreg/models/regressor.hpp"
#include "paqreg/train/train.hpp"

namespace paqreg::train {

struct Evaluation {
  std::size_t iteration = 0;
  std::size_t fold = 0;
  Metrics test;
  Metrics train;
  ingest::NormStats norm;  ///< fitted on the training rows of this split
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  ///< population
};

struct CvSummary {
  std::size_t n_folds = 0;
  std::size_t n_iterations = 0;
  MeanStd r2, mae, rmse;
  MeanStd train_r2, train_mae, train_rmse;
  std::vector<Evaluation> evaluations;

  nlohmann::json to_json(bool with_evaluations = true) const;
};

struct CvOptions {
  bool normalize = true;
  bool parallel = true;  ///< evaluate splits concurrently
};

/// For every iteration x fold: normaliser and model fitted on the training
/// rows only, metrics on the test fold. Throws InputError if a test fold has
/// fewer than 2 rows.
CvSummary cross_validate(const models::ModelFactory& factory, const ingest::FeatureMatrix& X,
                         std::span<const double> y, const ingest::FoldPlan& plan, const CvOptions& options = {});

/// Ordered list of (key, candidate values). Keys may be dotted paths into the
/// model spec, e.g. "train.learning_rate".
using ParamGrid = std::vector<std::pair<std::string, std::vector<nlohmann::json>>>;

struct GridRow {
  nlohmann::json config;
  bool diverged = false;
  std::string error;
  CvSummary summary;  ///< empty when diverged
  double mae = 0.0;   ///< CV mean MAE, +inf when diverged
  double rmse = 0.0;
};

struct GridResult {
  std::size_t best = 0;
  std::vector<GridRow> rows;  ///< Cartesian product, last key varying fastest

  const nlohmann::json& best_config() const { return rows[best].config; }
  nlohmann::json to_json() const;
};

/// Exhaustive search by CV mean MAE; ties go to lower RMSE, then the earlier
/// row. A configuration whose training raises NumericError is kept in the
/// table as diverged.
GridResult grid_search(const std::function<std::unique_ptr<models::Regressor>(const nlohmann::json&)>& factory,
                       const nlohmann::json& base_spec, const ParamGrid& grid, const ingest::FeatureMatrix& X,
                       std::span<const double> y, const ingest::FoldPlan& plan, const CvOptions& options = {});

/// Sets a dotted path inside `j`, creating objects as needed.
void set_dotted(nlohmann::json& j, const std::string& path, const nlohmann::json& value);

}  // namespace paqreg::train
