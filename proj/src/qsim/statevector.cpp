#include <cmath>
#include <numbers>
#include <string>

#include "paqreg/qsim/qsim.hpp"
#include "slot_angle.hpp"

namespace paqreg::qsim {

Statevector::Statevector(unsigned n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw InputError("statevector: n_qubits must be in 1.." + std::to_string(kMaxQubits));
  amps_.assign(std::size_t{1} << n_qubits, Amplitude(0.0, 0.0));
  amps_[0] = 1.0;
}

Statevector Statevector::from_amplitudes(unsigned n_qubits, std::vector<Amplitude> amps) {
  Statevector s(n_qubits);
  if (amps.size() != s.dim()) throw InputError("statevector: amplitude count must be 2^n");
  s.amps_ = std::move(amps);
  return s;
}

double Statevector::norm_squared() const { return parallel::norm_squared(amps_); }

double Statevector::expectation_z(unsigned q) const {
  if (q >= n_qubits_) throw InputError("statevector: qubit index out of range");
  return parallel::expectation_z(amps_, q);
}

std::vector<double> Statevector::expectations_z() const {
  // One pass over the amplitudes for all qubits.
  std::vector<double> e(n_qubits_, 0.0);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    for (unsigned q = 0; q < n_qubits_; ++q) e[q] += ((i >> q) & 1U) ? -p : p;
  }
  return e;
}

Mat2 gate_matrix(GateKind kind, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const Amplitude I(0.0, 1.0);
  switch (kind) {
    case GateKind::H: {
      const double r = std::numbers::sqrt2 / 2.0;
      return {r, r, r, -r};
    }
    case GateKind::X:
      return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y:
      return {0.0, -I, I, 0.0};
    case GateKind::Z:
      return {1.0, 0.0, 0.0, -1.0};
    case GateKind::RX:
      return {c, -I * s, -I * s, c};
    case GateKind::RY:
      return {c, -s, s, c};
    case GateKind::RZ:
      return {Amplitude(c, -s), 0.0, 0.0, Amplitude(c, s)};
    default:
      throw InputError("gate_matrix: not a single-qubit gate");
  }
}

namespace {

void check_gate(const Statevector& state, const GateOp& gate, const std::optional<double>& angle) {
  const unsigned k = arity(gate.kind);
  for (unsigned j = 0; j < k; ++j)
    if (gate.qubits[j] >= state.n_qubits()) throw InputError("apply_gate: qubit index out of range");
  if (k == 2 && gate.qubits[0] == gate.qubits[1]) throw InputError("apply_gate: qubit indices must differ");
  if (is_rotation(gate.kind) != angle.has_value())
    throw InputError("apply_gate: an angle is required for rotations and only for rotations");
}

void apply_unchecked(Statevector& state, GateKind kind, const std::array<unsigned, 2>& q, double angle) {
  auto amps = state.amplitudes();
  switch (kind) {
    case GateKind::Z:
      parallel::apply_diag(amps, q[0], 1.0, -1.0);
      break;
    case GateKind::RZ: {
      const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
      parallel::apply_diag(amps, q[0], Amplitude(c, -s), Amplitude(c, s));
      break;
    }
    case GateKind::CNOT:
      parallel::apply_cnot(amps, q[0], q[1]);
      break;
    case GateKind::CZ:
      parallel::apply_cz(amps, q[0], q[1]);
      break;
    default:
      parallel::apply_1q(amps, q[0], gate_matrix(kind, angle));
      break;
  }
}

}  // namespace

void apply_gate(Statevector& state, const GateOp& gate, std::optional<double> angle) {
  check_gate(state, gate, angle);
  apply_unchecked(state, gate.kind, gate.qubits, angle.value_or(0.0));
}

void apply_gate_inverse(Statevector& state, const GateOp& gate, std::optional<double> angle) {
  check_gate(state, gate, angle);
  // Fixed kinds are all self-inverse.
  apply_unchecked(state, gate.kind, gate.qubits, -angle.value_or(0.0));
}

namespace detail {

void check_lengths(const CircuitSpec& spec, std::span<const double> features, std::span<const double> params) {
  if (features.size() != spec.n_feature_slots)
    throw InputError("run_circuit: expected " + std::to_string(spec.n_feature_slots) + " features, got " +
                     std::to_string(features.size()));
  if (params.size() != spec.n_param_slots)
    throw InputError("run_circuit: expected " + std::to_string(spec.n_param_slots) + " parameters, got " +
                     std::to_string(params.size()));
}

void check_gate_bounds(const CircuitSpec& spec, const GateOp& g) {
  const bool bad_qubit = arity(g.kind) == 2 ? (g.qubits[0] >= spec.n_qubits || g.qubits[1] >= spec.n_qubits ||
                                               g.qubits[0] == g.qubits[1])
                                            : g.qubits[0] >= spec.n_qubits;
  if (bad_qubit) throw InputError("run_circuit: invalid qubit index");
  const auto slot = static_cast<std::size_t>(g.slot);
  if ((g.source == GateSource::Encoding && (g.slot < 0 || slot >= spec.n_feature_slots)) ||
      (g.source == GateSource::Trainable && (g.slot < 0 || slot >= spec.n_param_slots)))
    throw InputError("run_circuit: gate slot out of range");
  if (is_rotation(g.kind) == (g.source == GateSource::Fixed))
    throw InputError("run_circuit: rotations must be encoding or trainable gates");
}

void apply_step(Statevector& state, const GateOp& g, double angle, bool inverse) {
  apply_unchecked(state, g.kind, g.qubits, inverse ? -angle : angle);
}

}  // namespace detail

Statevector simulate(const CircuitSpec& spec, std::span<const double> features, std::span<const double> params) {
  detail::check_lengths(spec, features, params);
  Statevector state(spec.n_qubits);
  for (const auto& g : spec.gates) {
    detail::check_gate_bounds(spec, g);
    detail::apply_step(state, g, detail::slot_angle(g, features, params), false);
  }
  return state;
}

Expectations run_circuit(const CircuitSpec& spec, std::span<const double> features,
                         std::span<const double> params) {
  return {simulate(spec, features, params).expectations_z()};
}

}  // namespace paqreg::qsim
