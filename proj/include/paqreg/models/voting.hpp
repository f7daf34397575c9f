#pragma once

#include <memory>
#include <vector>

#include "paqreg/models/regressor.hpp"

namespace paqreg::models {

/// Weighted mean of member predictions: sum(w_i * p_i) / sum(w_i).
class VotingRegressor : public Regressor {
 public:
  struct Member {
    std::unique_ptr<Regressor> model;
    double weight = 1.0;
  };

  explicit VotingRegressor(std::vector<Member> members);

  std::string kind() const override { return "voting"; }
  void fit(const Matrix& X, std::span<const double> y) override;
  std::vector<double> predict(const Matrix& X) const override;

  nlohmann::json spec_json() const override;
  nlohmann::json params_json() const override;
  void load_params(const nlohmann::json& j) override;

  const std::vector<Member>& members() const { return members_; }

 private:
  std::vector<Member> members_;
  double weight_sum_ = 0.0;
};

/// Combines already computed member predictions (rows aligned).
std::vector<double> weighted_vote(const std::vector<std::vector<double>>& predictions, std::span<const double> weights);

}  // namespace paqreg::models
