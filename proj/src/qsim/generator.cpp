#include <algorithm>

#include "paqreg/qsim/qsim.hpp"

namespace paqreg::qsim {

namespace {

constexpr std::array<GateKind, 3> kRotations{GateKind::RX, GateKind::RY, GateKind::RZ};

void append_ring(std::vector<GateOp>& gates, unsigned n) {
  if (n < 2) return;
  if (n == 2) {
    gates.push_back(GateOp::fixed(GateKind::CNOT, 0, 1));
    return;
  }
  for (unsigned i = 0; i < n; ++i) gates.push_back(GateOp::fixed(GateKind::CNOT, i, (i + 1) % n));
}

}  // namespace

CircuitSpec generate_circuit(unsigned n_qubits, std::size_t n_feature_slots, std::size_t n_param_slots,
                             std::uint64_t seed) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw InputError("generate_circuit: bad qubit count");
  if (n_feature_slots < 1 || n_param_slots < 1)
    throw InputError("generate_circuit: need at least one feature slot and one parameter slot");

  Rng rng(seed);
  CircuitSpec spec;
  spec.n_qubits = n_qubits;
  spec.n_feature_slots = n_feature_slots;
  spec.n_param_slots = n_param_slots;

  const std::size_t layers = (n_feature_slots + n_qubits - 1) / n_qubits;
  std::size_t next_param = 0;
  for (std::size_t layer = 0; layer < layers; ++layer) {
    const std::size_t f_begin = layer * n_qubits;
    const std::size_t f_end = std::min(n_feature_slots, f_begin + n_qubits);
    for (std::size_t f = f_begin; f < f_end; ++f)
      spec.gates.push_back(
          GateOp::encoding(GateKind::RY, static_cast<unsigned>(f - f_begin), static_cast<int>(f)));

    // Parameters are spread over the blocks as evenly as possible, earlier
    // blocks taking the remainder.
    const std::size_t block = n_param_slots / layers + (layer < n_param_slots % layers ? 1 : 0);
    std::size_t placed = 0;
    while (placed < block) {
      const std::size_t pass = std::min<std::size_t>(n_qubits, block - placed);
      for (std::size_t q = 0; q < pass; ++q) {
        const GateKind kind = kRotations[rng.below(kRotations.size())];
        spec.gates.push_back(GateOp::trainable(kind, static_cast<unsigned>(q), static_cast<int>(next_param++)));
      }
      placed += pass;
      append_ring(spec.gates, n_qubits);
    }
  }
  return spec;
}

CircuitSpec random_circuit(unsigned n_qubits, std::size_t n_fixed, std::size_t n_feature_slots,
                           std::size_t n_param_slots, Rng& rng) {
  CircuitSpec spec;
  spec.n_qubits = n_qubits;
  spec.n_feature_slots = n_feature_slots;
  spec.n_param_slots = n_param_slots;

  auto random_qubit = [&] { return static_cast<unsigned>(rng.below(n_qubits)); };
  auto random_rotation = [&] { return kRotations[rng.below(kRotations.size())]; };

  for (std::size_t p = 0; p < n_param_slots; ++p)
    spec.gates.push_back(GateOp::trainable(random_rotation(), random_qubit(), static_cast<int>(p)));
  for (std::size_t f = 0; f < n_feature_slots; ++f)
    spec.gates.push_back(GateOp::encoding(random_rotation(), random_qubit(), static_cast<int>(f)));

  constexpr std::array<GateKind, 6> fixed_kinds{GateKind::H, GateKind::X,    GateKind::Y,
                                                GateKind::Z, GateKind::CNOT, GateKind::CZ};
  const std::size_t n_kinds = n_qubits >= 2 ? fixed_kinds.size() : 4;
  for (std::size_t i = 0; i < n_fixed; ++i) {
    const GateKind kind = fixed_kinds[rng.below(n_kinds)];
    if (arity(kind) == 2) {
      const unsigned a = random_qubit();
      unsigned b = static_cast<unsigned>(rng.below(n_qubits - 1));
      if (b >= a) ++b;
      spec.gates.push_back(GateOp::fixed(kind, a, b));
    } else {
      spec.gates.push_back(GateOp::fixed(kind, random_qubit()));
    }
  }
  rng.shuffle(std::span<GateOp>(spec.gates));
  return spec;
}

}  // namespace paqreg::qsim
