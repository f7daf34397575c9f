#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "paqreg/common.hpp"
#include "paqreg/qsim/kernels.hpp"

namespace paqreg::qsim {

inline constexpr unsigned kMaxQubits = 16;

enum class GateKind : std::uint8_t { H, X, Y, Z, RX, RY, RZ, CNOT, CZ };
enum class GateSource : std::uint8_t { Fixed, Encoding, Trainable };

constexpr bool is_rotation(GateKind k) {
  return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ;
}
constexpr unsigned arity(GateKind k) { return (k == GateKind::CNOT || k == GateKind::CZ) ? 2 : 1; }
std::string_view to_string(GateKind k);
std::string_view to_string(GateSource s);
GateKind parse_gate_kind(std::string_view s);
GateSource parse_gate_source(std::string_view s);

/// One gate in a circuit. For CNOT, qubits[0] is the control.
/// Rotations take their angle from a feature slot (encoding) or a
/// parameter slot (trainable); fixed gates carry no angle.
struct GateOp {
  GateKind kind = GateKind::H;
  std::array<unsigned, 2> qubits{0, 0};
  GateSource source = GateSource::Fixed;
  int slot = -1;

  static GateOp fixed(GateKind k, unsigned q0, unsigned q1 = 0) { return {k, {q0, q1}, GateSource::Fixed, -1}; }
  static GateOp encoding(GateKind k, unsigned q, int feature_slot) {
    return {k, {q, 0}, GateSource::Encoding, feature_slot};
  }
  static GateOp trainable(GateKind k, unsigned q, int param_slot) {
    return {k, {q, 0}, GateSource::Trainable, param_slot};
  }

  bool operator==(const GateOp&) const = default;
};

struct CircuitSpec {
  unsigned n_qubits = 1;
  std::vector<GateOp> gates;
  std::size_t n_feature_slots = 0;
  std::size_t n_param_slots = 0;

  /// Throws InputError when qubit indices, gate sources or slot coverage are
  /// inconsistent: every feature slot used at least once, every parameter
  /// slot exactly once.
  void validate() const;

  std::size_t count(GateSource s) const;

  bool operator==(const CircuitSpec&) const = default;
};

nlohmann::json to_json(const CircuitSpec& spec);
/// Accepts {"format": 1, ...}; any other format version is an InputError.
CircuitSpec circuit_from_json(const nlohmann::json& j);

class Statevector {
 public:
  /// |0...0> on n qubits.
  explicit Statevector(unsigned n_qubits);
  static Statevector from_amplitudes(unsigned n_qubits, std::vector<Amplitude> amps);

  unsigned n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<Amplitude> amplitudes() { return amps_; }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  Amplitude operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const;
  double expectation_z(unsigned q) const;
  std::vector<double> expectations_z() const;

 private:
  unsigned n_qubits_;
  std::vector<Amplitude> amps_;
};

/// The 2x2 matrix of a single-qubit gate; `angle` is ignored for fixed kinds.
/// Rotations use the half-angle convention exp(-i angle P / 2).
Mat2 gate_matrix(GateKind kind, double angle);

/// Applies `gate` in place. `angle` must be present iff the gate is a rotation.
void apply_gate(Statevector& state, const GateOp& gate, std::optional<double> angle = std::nullopt);
/// Applies the inverse of `gate`.
void apply_gate_inverse(Statevector& state, const GateOp& gate, std::optional<double> angle = std::nullopt);

struct Expectations {
  std::vector<double> values;  ///< <Z_q> for q = 0..n-1
};

/// Final state of the circuit started from |0...0>. Encoding rotations take
/// the raw feature value as their angle.
Statevector simulate(const CircuitSpec& spec, std::span<const double> features,
                     std::span<const double> params);
Expectations run_circuit(const CircuitSpec& spec, std::span<const double> features,
                         std::span<const double> params);

/// d<Z_q>/d theta_j by the two-point shift rule (n_qubits x n_param_slots).
Matrix grad_param_shift(const CircuitSpec& spec, std::span<const double> features,
                        std::span<const double> params);

struct AdjointJacobian {
  Matrix params;    ///< n_qubits x n_param_slots
  Matrix features;  ///< n_qubits x n_feature_slots, empty unless requested
};

/// Full Jacobian by reverse sweep, one adjoint state per measured qubit.
AdjointJacobian grad_adjoint(const CircuitSpec& spec, std::span<const double> features,
                             std::span<const double> params, bool with_features = false);

struct VectorJacobian {
  std::vector<double> params;
  std::vector<double> features;  ///< empty unless requested
};

/// upstream^T * Jacobian with a single adjoint state. `final_state` must be the
/// output of simulate() for the same arguments.
VectorJacobian vjp_adjoint(const CircuitSpec& spec, std::span<const double> features,
                           std::span<const double> params, const Statevector& final_state,
                           std::span<const double> upstream, bool with_features = false);

/// Seeded layered template: ceil(F/n) RY encoding layers (feature f on qubit
/// f mod n), each followed by its share of trainable rotations interleaved
/// with ring CNOTs.
CircuitSpec generate_circuit(unsigned n_qubits, std::size_t n_feature_slots, std::size_t n_param_slots,
                             std::uint64_t seed);

/// Unstructured random circuit mixing every gate kind; used for gradient and
/// physics checks.
CircuitSpec random_circuit(unsigned n_qubits, std::size_t n_fixed, std::size_t n_feature_slots,
                           std::size_t n_param_slots, Rng& rng);

/// Empirical <Z_q> from `shots` sampled bitstrings.
Expectations measure_shots(const CircuitSpec& spec, std::span<const double> features,
                           std::span<const double> params, std::size_t shots, std::uint64_t seed);

}  // namespace paqreg::qsim
