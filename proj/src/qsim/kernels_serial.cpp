#include <algorithm>
#include <utility>

#include "paqreg/qsim/kernels.hpp"

namespace paqreg::qsim::serial {

void apply_1q(std::span<Amplitude> amps, unsigned target, const Mat2& u) {
  const std::size_t half = amps.size() / 2;
  const std::size_t bit = std::size_t{1} << target;
  for (std::size_t k = 0; k < half; ++k) {
    const std::size_t i0 = insert_zero_bit(k, target);
    const std::size_t i1 = i0 | bit;
    const Amplitude a0 = amps[i0];
    const Amplitude a1 = amps[i1];
    amps[i0] = u.m00 * a0 + u.m01 * a1;
    amps[i1] = u.m10 * a0 + u.m11 * a1;
  }
}

void apply_diag(std::span<Amplitude> amps, unsigned target, Amplitude d0, Amplitude d1) {
  const std::size_t bit = std::size_t{1} << target;
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= (i & bit) ? d1 : d0;
}

void apply_cnot(std::span<Amplitude> amps, unsigned control, unsigned target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
  }
}

void apply_cz(std::span<Amplitude> amps, unsigned a, unsigned b) {
  const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
  for (std::size_t i = 0; i < amps.size(); ++i)
    if ((i & mask) == mask) amps[i] = -amps[i];
}

double expectation_z(std::span<const Amplitude> amps, unsigned q) {
  const std::size_t bit = std::size_t{1} << q;
  double e = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    e += (i & bit) ? -p : p;
  }
  return e;
}

double norm_squared(std::span<const Amplitude> amps) {
  double s = 0.0;
  for (const auto& a : amps) s += std::norm(a);
  return s;
}

Amplitude inner_pauli(std::span<const Amplitude> bra, std::span<const Amplitude> ket, unsigned q,
                      char pauli) {
  const std::size_t bit = std::size_t{1} << q;
  const Amplitude I(0.0, 1.0);
  Amplitude acc(0.0, 0.0);
  for (std::size_t i = 0; i < ket.size(); ++i) {
    Amplitude pk;
    switch (pauli) {
      case 'X':
        pk = ket[i ^ bit];
        break;
      case 'Y':
        pk = (i & bit) ? I * ket[i ^ bit] : -I * ket[i ^ bit];
        break;
      default:
        pk = (i & bit) ? -ket[i] : ket[i];
        break;
    }
    acc += std::conj(bra[i]) * pk;
  }
  return acc;
}

}  // namespace paqreg::qsim::serial
