#include "paqreg/models/voting.hpp"

namespace paqreg::models {

namespace {

double checked_weight_sum(std::span<const double> weights) {
  if (weights.empty()) throw InputError("voting: need at least one member");
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("voting: weights must be non-negative");
    s += w;
  }
  if (s == 0.0) throw InputError("voting: weights sum to zero");
  return s;
}

}  // namespace

std::vector<double> weighted_vote(const std::vector<std::vector<double>>& predictions,
                                  std::span<const double> weights) {
  if (predictions.size() != weights.size()) throw InputError("voting: one weight per member required");
  const double total = checked_weight_sum(weights);
  const std::size_t n = predictions.front().size();
  std::vector<double> out(n, 0.0);
  for (std::size_t m = 0; m < predictions.size(); ++m) {
    if (predictions[m].size() != n) throw InputError("voting: member predictions differ in length");
    for (std::size_t i = 0; i < n; ++i) out[i] += weights[m] * predictions[m][i];
  }
  for (double& v : out) v /= total;
  return out;
}

VotingRegressor::VotingRegressor(std::vector<Member> members) : members_(std::move(members)) {
  std::vector<double> w;
  for (const auto& m : members_) {
    if (!m.model) throw InputError("voting: null member");
    w.push_back(m.weight);
  }
  weight_sum_ = checked_weight_sum(w);
}

void VotingRegressor::fit(const Matrix& X, std::span<const double> y) {
  for (auto& m : members_) m.model->fit(X, y);
}

std::vector<double> VotingRegressor::predict(const Matrix& X) const {
  std::vector<std::vector<double>> preds;
  std::vector<double> w;
  for (const auto& m : members_) {
    preds.push_back(m.model->predict(X));
    w.push_back(m.weight);
  }
  return weighted_vote(preds, w);
}

nlohmann::json VotingRegressor::spec_json() const {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : members_) members.push_back({{"weight", m.weight}, {"model", m.model->spec_json()}});
  return {{"kind", "voting"}, {"members", std::move(members)}};
}

nlohmann::json VotingRegressor::params_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : members_) out.push_back(m.model->params_json());
  return out;
}

void VotingRegressor::load_params(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != members_.size()) throw InputError("voting: parameter list does not match members");
  for (std::size_t i = 0; i < members_.size(); ++i) members_[i].model->load_params(j[i]);
}

}  // namespace paqreg::models
