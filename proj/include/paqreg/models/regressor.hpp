#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "paqreg/common.hpp"

namespace paqreg::models {

/// Common surface of every fitted model in the toolkit.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual std::string kind() const = 0;
  virtual void fit(const Matrix& X, std::span<const double> y) = 0;
  virtual std::vector<double> predict(const Matrix& X) const = 0;

  /// Hyperparameters; enough to rebuild an unfitted model.
  virtual nlohmann::json spec_json() const = 0;
  /// Fitted state.
  virtual nlohmann::json params_json() const = 0;
  virtual void load_params(const nlohmann::json& j) = 0;
};

using ModelFactory = std::function<std::unique_ptr<Regressor>()>;

inline constexpr int kCheckpointFormat = 1;

/// {"format": 1, "kind", "spec", "parameters"}
nlohmann::json save_checkpoint(const Regressor& model);
/// Throws InputError on a format version or kind it does not know.
std::unique_ptr<Regressor> load_checkpoint(const nlohmann::json& j);

/// Builds an unfitted model from {"kind": ..., <hyperparameters>}.
std::unique_ptr<Regressor> make_model(const nlohmann::json& spec);

}  // namespace paqreg::models
