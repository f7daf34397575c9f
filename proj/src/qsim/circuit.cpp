#include <algorithm>
#include <string>

#include "paqreg/qsim/qsim.hpp"

namespace paqreg::qsim {

namespace {

constexpr std::array<std::string_view, 9> kKindNames{"H", "X", "Y", "Z", "RX", "RY", "RZ", "CNOT", "CZ"};
constexpr std::array<std::string_view, 3> kSourceNames{"fixed", "encoding", "trainable"};

}  // namespace

std::string_view to_string(GateKind k) { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(GateSource s) { return kSourceNames[static_cast<std::size_t>(s)]; }

GateKind parse_gate_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == s) return static_cast<GateKind>(i);
  throw InputError("unknown gate kind '" + std::string(s) + "'");
}

GateSource parse_gate_source(std::string_view s) {
  for (std::size_t i = 0; i < kSourceNames.size(); ++i)
    if (kSourceNames[i] == s) return static_cast<GateSource>(i);
  throw InputError("unknown gate source '" + std::string(s) + "'");
}

std::size_t CircuitSpec::count(GateSource s) const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [s](const GateOp& g) { return g.source == s; }));
}

void CircuitSpec::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw InputError("circuit: n_qubits must be in 1.." + std::to_string(kMaxQubits));
  std::vector<int> feature_uses(n_feature_slots, 0);
  std::vector<int> param_uses(n_param_slots, 0);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const GateOp& g = gates[i];
    const std::string where = "circuit gate " + std::to_string(i) + ": ";
    const unsigned k = arity(g.kind);
    for (unsigned j = 0; j < k; ++j)
      if (g.qubits[j] >= n_qubits) throw InputError(where + "qubit index out of range");
    if (k == 2 && g.qubits[0] == g.qubits[1]) throw InputError(where + "qubit indices must be distinct");
    switch (g.source) {
      case GateSource::Fixed:
        if (is_rotation(g.kind)) throw InputError(where + "rotation gates need an encoding or trainable source");
        break;
      case GateSource::Encoding:
        if (!is_rotation(g.kind)) throw InputError(where + "encoding source requires RX/RY/RZ");
        if (g.slot < 0 || static_cast<std::size_t>(g.slot) >= n_feature_slots)
          throw InputError(where + "feature slot out of range");
        ++feature_uses[static_cast<std::size_t>(g.slot)];
        break;
      case GateSource::Trainable:
        if (!is_rotation(g.kind)) throw InputError(where + "trainable source requires RX/RY/RZ");
        if (g.slot < 0 || static_cast<std::size_t>(g.slot) >= n_param_slots)
          throw InputError(where + "parameter slot out of range");
        ++param_uses[static_cast<std::size_t>(g.slot)];
        break;
    }
  }
  for (std::size_t s = 0; s < feature_uses.size(); ++s)
    if (feature_uses[s] == 0) throw InputError("circuit: feature slot " + std::to_string(s) + " unused");
  for (std::size_t s = 0; s < param_uses.size(); ++s)
    if (param_uses[s] != 1)
      throw InputError("circuit: parameter slot " + std::to_string(s) + " must be used exactly once");
}

nlohmann::json to_json(const CircuitSpec& spec) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : spec.gates) {
    nlohmann::json q = nlohmann::json::array();
    for (unsigned j = 0; j < arity(g.kind); ++j) q.push_back(g.qubits[j]);
    nlohmann::json jg{{"kind", to_string(g.kind)}, {"qubits", q}, {"source", to_string(g.source)}};
    jg["slot"] = g.source == GateSource::Fixed ? nlohmann::json(nullptr) : nlohmann::json(g.slot);
    gates.push_back(std::move(jg));
  }
  return {{"format", 1},
          {"n_qubits", spec.n_qubits},
          {"n_feature_slots", spec.n_feature_slots},
          {"n_param_slots", spec.n_param_slots},
          {"gates", gates}};
}

CircuitSpec circuit_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", 0) != 1) throw InputError("circuit: unsupported format version");
    CircuitSpec spec;
    spec.n_qubits = j.at("n_qubits").get<unsigned>();
    for (const auto& jg : j.at("gates")) {
      GateOp g;
      g.kind = parse_gate_kind(jg.at("kind").get<std::string>());
      g.source = parse_gate_source(jg.value("source", std::string("fixed")));
      const auto& q = jg.at("qubits");
      if (q.size() != arity(g.kind)) throw InputError("circuit: wrong number of qubits for gate");
      for (std::size_t i = 0; i < q.size(); ++i) g.qubits[i] = q[i].get<unsigned>();
      g.slot = (jg.contains("slot") && !jg["slot"].is_null()) ? jg["slot"].get<int>() : -1;
      spec.gates.push_back(g);
    }
    // Slot counts are derivable from the gate list; explicit values win.
    std::size_t nf = 0, np = 0;
    for (const auto& g : spec.gates) {
      if (g.source == GateSource::Encoding) nf = std::max(nf, static_cast<std::size_t>(g.slot + 1));
      if (g.source == GateSource::Trainable) np = std::max(np, static_cast<std::size_t>(g.slot + 1));
    }
    spec.n_feature_slots = j.value("n_feature_slots", nf);
    spec.n_param_slots = j.value("n_param_slots", np);
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("circuit: malformed JSON: ") + e.what());
  }
}

}  // namespace paqreg::qsim
