#pragma once

#include "paqreg/qsim/qsim.hpp"

namespace paqreg::qsim::detail {

inline double slot_angle(const GateOp& g, std::span<const double> features, std::span<const double> params) {
  switch (g.source) {
    case GateSource::Encoding:
      return features[static_cast<std::size_t>(g.slot)];
    case GateSource::Trainable:
      return params[static_cast<std::size_t>(g.slot)];
    default:
      return 0.0;
  }
}

void check_lengths(const CircuitSpec& spec, std::span<const double> features, std::span<const double> params);
void check_gate_bounds(const CircuitSpec& spec, const GateOp& g);
void apply_step(Statevector& state, const GateOp& g, double angle, bool inverse);

inline char generator_of(GateKind k) {
  return k == GateKind::RX ? 'X' : (k == GateKind::RY ? 'Y' : 'Z');
}

}  // namespace paqreg::qsim::detail
