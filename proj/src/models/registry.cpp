#include <set>

#include "paqreg/models/regressor.hpp"
#include "paqreg/models/trees.hpp"
#include "paqreg/models/voting.hpp"
#include "paqreg/train/neural.hpp"

namespace paqreg::models {

namespace {

void check_keys(const nlohmann::json& spec, const std::string& kind, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : spec.items())
    if (key != "kind" && !allowed.contains(key)) throw InputError(kind + ": unknown model option '" + key + "'");
}

}  // namespace

std::unique_ptr<Regressor> make_model(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind")) throw InputError("model spec needs a \"kind\"");
  const auto kind = spec.at("kind").get<std::string>();
  try {
    if (kind == "gbdt" || kind == "random_forest") {
      check_keys(spec, kind,
                 {"n_trees", "max_depth", "learning_rate", "min_samples_leaf", "feature_subsample", "seed"});
      const auto mode = kind == "gbdt" ? EnsembleMode::Gbdt : EnsembleMode::RandomForest;
      return std::make_unique<TreeEnsemble>(TreeEnsembleSpec::from_json(spec, mode));
    }
    if (kind == "mlp") {
      check_keys(spec, kind, {"train"});
      return std::make_unique<train::NeuralRegressor>(train::TrainConfig::from_json(spec.value("train", nlohmann::json::object())));
    }
    if (kind == "hybrid") {
      check_keys(spec, kind,
                 {"n_qubits", "n_sub_encoders", "features_per_qc", "params_per_qc", "circuit_seed", "angle_scale", "train"});
      train::HybridShape h;
      h.n_qubits = spec.value("n_qubits", h.n_qubits);
      h.n_sub_encoders = spec.value("n_sub_encoders", h.n_sub_encoders);
      h.features_per_circuit = spec.value("features_per_qc", h.features_per_circuit);
      h.params_per_circuit = spec.value("params_per_qc", h.params_per_circuit);
      h.circuit_seed = spec.value("circuit_seed", h.circuit_seed);
      h.angle_scale = spec.value("angle_scale", h.angle_scale);
      return std::make_unique<train::NeuralRegressor>(
          h, train::TrainConfig::from_json(spec.value("train", nlohmann::json::object())));
    }
    if (kind == "voting") {
      check_keys(spec, kind, {"members"});
      std::vector<VotingRegressor::Member> members;
      for (const auto& m : spec.at("members"))
        members.push_back({make_model(m.at("model")), m.value("weight", 1.0)});
      return std::make_unique<VotingRegressor>(std::move(members));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kind + ": bad model spec: " + e.what());
  }
  throw InputError("unknown model kind '" + kind + "'");
}

nlohmann::json save_checkpoint(const Regressor& model) {
  return {{"format", kCheckpointFormat},
          {"kind", model.kind()},
          {"spec", model.spec_json()},
          {"parameters", model.params_json()}};
}

std::unique_ptr<Regressor> load_checkpoint(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("format")) throw InputError("checkpoint: missing \"format\"");
  const auto& fmt = j.at("format");
  if (!fmt.is_number_integer() || fmt.get<int>() != kCheckpointFormat)
    throw InputError("checkpoint: unsupported format version " + fmt.dump() + " (expected " +
                     std::to_string(kCheckpointFormat) + ")");
  auto spec = j.at("spec");
  const auto kind = j.at("kind").get<std::string>();
  if (spec.value("kind", kind) != kind) throw InputError("checkpoint: kind does not match its spec");
  spec["kind"] = kind;
  auto model = make_model(spec);
  try {
    model->load_params(j.at("parameters"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("checkpoint: bad parameters: " + std::string(e.what()));
  }
  return model;
}

}  // namespace paqreg::models
