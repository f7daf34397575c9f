#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "paqreg/common.hpp"
#include "paqreg/models/regressor.hpp"

namespace paqreg::models {

struct TreeNode {
  int feature = -1;  ///< -1 for a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  ///< mean target of the node's samples
  double gain = 0.0;   ///< squared-error reduction of the split
  std::size_t n_samples = 0;

  bool is_leaf() const { return feature < 0; }
};

struct TreeParams {
  std::size_t max_depth = 3;
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  ///< features tried per node; 0 = all
};

/// Per-feature row orderings shared by every tree fitted on the same matrix.
class SortedColumns {
 public:
  explicit SortedColumns(const Matrix& X);
  std::span<const std::size_t> order(std::size_t feature) const { return order_[feature]; }
  std::size_t n_features() const { return order_.size(); }

 private:
  std::vector<std::vector<std::size_t>> order_;
};

/// Greedy variance-reduction regression tree. Samples go left when
/// x[feature] <= threshold.
class RegressionTree {
 public:
  /// `samples` lists training rows; repeats (bootstrap) are allowed.
  static RegressionTree fit(const Matrix& X, std::span<const double> y, std::span<const std::size_t> samples,
                            const SortedColumns& sorted, const TreeParams& params, Rng& rng);

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;
  void add_importance(std::span<double> importance) const;

  /// Nested {feature, threshold, left, right, value} objects; leaves carry only value.
  nlohmann::json to_json() const;
  static RegressionTree from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

enum class EnsembleMode { Gbdt, RandomForest };

struct TreeEnsembleSpec {
  EnsembleMode mode = EnsembleMode::Gbdt;
  std::size_t n_trees = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;     ///< gbdt only
  std::size_t min_samples_leaf = 1;
  double feature_subsample = 1.0;  ///< fraction of features tried per node
  std::uint64_t seed = 0;

  static TreeEnsembleSpec gbdt_defaults();
  static TreeEnsembleSpec random_forest_defaults();
  nlohmann::json to_json() const;
  static TreeEnsembleSpec from_json(const nlohmann::json& j, EnsembleMode mode);
};

/// Gradient-boosted trees (squared error, base = mean target) or a random
/// forest (bootstrap rows, per-node feature subsampling, mean of trees).
class TreeEnsemble : public Regressor {
 public:
  explicit TreeEnsemble(TreeEnsembleSpec spec);

  std::string kind() const override { return spec_.mode == EnsembleMode::Gbdt ? "gbdt" : "random_forest"; }
  void fit(const Matrix& X, std::span<const double> y) override;
  std::vector<double> predict(const Matrix& X) const override;
  double predict_one(std::span<const double> x) const;

  nlohmann::json spec_json() const override { return spec_.to_json(); }
  nlohmann::json params_json() const override;
  void load_params(const nlohmann::json& j) override;

  const TreeEnsembleSpec& spec() const { return spec_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  double base_prediction() const { return base_; }
  /// Total squared-error reduction per feature, normalised to sum to 1
  /// (all zeros when no tree ever split).
  std::vector<double> feature_importance() const;
  /// Training MSE after each boosting round (gbdt only), round 0 = base.
  const std::vector<double>& training_loss() const { return train_loss_; }

 private:
  TreeEnsembleSpec spec_;
  std::size_t n_features_ = 0;
  double base_ = 0.0;
  std::vector<RegressionTree> trees_;
  std::vector<double> train_loss_;
};

}  // namespace paqreg::models
