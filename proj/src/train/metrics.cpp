#include <cmath>

#include "paqreg/train/train.hpp"

namespace paqreg::train {

nlohmann::json to_json(const Metrics& m) { return {{"r2", m.r2}, {"mae", m.mae}, {"rmse", m.rmse}}; }

Metrics compute_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw InputError("metrics: y_true and y_pred differ in length");
  if (y_true.empty()) throw InputError("metrics: empty input");
  const double n = static_cast<double>(y_true.size());
  const double mu = mean(y_true);
  double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = y_true[i] - y_pred[i];
    ss_res += e * e;
    abs_sum += std::abs(e);
    ss_tot += (y_true[i] - mu) * (y_true[i] - mu);
  }
  if (ss_tot == 0.0) throw InputError("metrics: r2 is undefined for a constant y_true");
  return {1.0 - ss_res / ss_tot, abs_sum / n, std::sqrt(ss_res / n)};
}

}  // namespace paqreg::train
