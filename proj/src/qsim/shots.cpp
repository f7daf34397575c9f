#include <algorithm>

#include "paqreg/qsim/qsim.hpp"

namespace paqreg::qsim {

Expectations measure_shots(const CircuitSpec& spec, std::span<const double> features,
                           std::span<const double> params, std::size_t shots, std::uint64_t seed) {
  if (shots < 1) throw InputError("measure_shots: shots must be >= 1");
  const Statevector state = simulate(spec, features, params);
  const auto amps = state.amplitudes();

  std::vector<double> cdf(amps.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps[i]);
    cdf[i] = acc;
  }

  Rng rng(seed);
  std::vector<std::size_t> ones(spec.n_qubits, 0);
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    // First index with cdf > u; its probability is necessarily non-zero.
    const auto outcome = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    for (unsigned q = 0; q < spec.n_qubits; ++q) ones[q] += (outcome >> q) & 1U;
  }

  Expectations e;
  e.values.resize(spec.n_qubits);
  for (unsigned q = 0; q < spec.n_qubits; ++q)
    e.values[q] = 1.0 - 2.0 * static_cast<double>(ones[q]) / static_cast<double>(shots);
  return e;
}

}  // namespace paqreg::qsim
