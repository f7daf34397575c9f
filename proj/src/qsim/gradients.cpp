#include <numbers>

#include "paqreg/qsim/qsim.hpp"
#include "slot_angle.hpp"

namespace paqreg::qsim {

Matrix grad_param_shift(const CircuitSpec& spec, std::span<const double> features,
                        std::span<const double> params) {
  detail::check_lengths(spec, features, params);
  constexpr double shift = std::numbers::pi / 2.0;
  Matrix jac(spec.n_qubits, spec.n_param_slots);
  std::vector<double> shifted(params.begin(), params.end());
  for (std::size_t j = 0; j < spec.n_param_slots; ++j) {
    shifted[j] = params[j] + shift;
    const auto plus = run_circuit(spec, features, shifted).values;
    shifted[j] = params[j] - shift;
    const auto minus = run_circuit(spec, features, shifted).values;
    shifted[j] = params[j];
    for (unsigned q = 0; q < spec.n_qubits; ++q) jac(q, j) = (plus[q] - minus[q]) / 2.0;
  }
  return jac;
}

// Reverse sweep. With psi_k the state after gate k and lambda_k the observable
// applied to the final state and pulled back through gates N..k+1,
//   dE/dtheta_k = Im <lambda_k| P_k |psi_k>
// for a gate exp(-i theta P / 2). Both states are then pulled back through
// gate k.

AdjointJacobian grad_adjoint(const CircuitSpec& spec, std::span<const double> features,
                             std::span<const double> params, bool with_features) {
  Statevector psi = simulate(spec, features, params);
  const unsigned n = spec.n_qubits;

  std::vector<Statevector> lambdas;
  lambdas.reserve(n);
  for (unsigned q = 0; q < n; ++q) {
    Statevector l = psi;
    parallel::apply_diag(l.amplitudes(), q, 1.0, -1.0);
    lambdas.push_back(std::move(l));
  }

  AdjointJacobian out{Matrix(n, spec.n_param_slots),
                      with_features ? Matrix(n, spec.n_feature_slots) : Matrix()};

  for (std::size_t k = spec.gates.size(); k-- > 0;) {
    const GateOp& g = spec.gates[k];
    const double angle = detail::slot_angle(g, features, params);
    const bool wants_grad =
        g.source == GateSource::Trainable || (with_features && g.source == GateSource::Encoding);
    if (wants_grad) {
      const char pauli = detail::generator_of(g.kind);
      Matrix& target = g.source == GateSource::Trainable ? out.params : out.features;
      const auto slot = static_cast<std::size_t>(g.slot);
      for (unsigned q = 0; q < n; ++q)
        target(q, slot) += parallel::inner_pauli(lambdas[q].amplitudes(), psi.amplitudes(), g.qubits[0], pauli).imag();
    }
    if (k == 0) break;
    detail::apply_step(psi, g, angle, true);
    for (auto& l : lambdas) detail::apply_step(l, g, angle, true);
  }
  return out;
}

VectorJacobian vjp_adjoint(const CircuitSpec& spec, std::span<const double> features,
                           std::span<const double> params, const Statevector& final_state,
                           std::span<const double> upstream, bool with_features) {
  detail::check_lengths(spec, features, params);
  if (upstream.size() != spec.n_qubits) throw InputError("vjp_adjoint: upstream length must equal n_qubits");
  if (final_state.n_qubits() != spec.n_qubits) throw InputError("vjp_adjoint: state width mismatch");

  VectorJacobian out;
  out.params.assign(spec.n_param_slots, 0.0);
  if (with_features) out.features.assign(spec.n_feature_slots, 0.0);

  Statevector psi = final_state;
  Statevector lambda = final_state;
  {
    // lambda = (sum_q g_q Z_q) psi; the observable is diagonal.
    auto amps = lambda.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
      double w = 0.0;
      for (unsigned q = 0; q < spec.n_qubits; ++q) w += ((i >> q) & 1U) ? -upstream[q] : upstream[q];
      amps[i] *= w;
    }
  }

  for (std::size_t k = spec.gates.size(); k-- > 0;) {
    const GateOp& g = spec.gates[k];
    const double angle = detail::slot_angle(g, features, params);
    const auto slot = static_cast<std::size_t>(g.slot);
    if (g.source == GateSource::Trainable) {
      out.params[slot] +=
          parallel::inner_pauli(lambda.amplitudes(), psi.amplitudes(), g.qubits[0], detail::generator_of(g.kind)).imag();
    } else if (with_features && g.source == GateSource::Encoding) {
      out.features[slot] +=
          parallel::inner_pauli(lambda.amplitudes(), psi.amplitudes(), g.qubits[0], detail::generator_of(g.kind)).imag();
    }
    if (k == 0) break;
    detail::apply_step(psi, g, angle, true);
    detail::apply_step(lambda, g, angle, true);
  }
  return out;
}

}  // namespace paqreg::qsim
