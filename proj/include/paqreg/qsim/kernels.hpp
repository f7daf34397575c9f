#pragma once

// Statevector kernels. Basis index bit q holds the value of qubit q.
//
// Two implementations share one signature set: `serial` is the plain
// reference used by tests and benchmarks as ground truth, `parallel`
// partitions the independent amplitude pairs across OpenMP threads.

#include <complex>
#include <cstddef>
#include <span>

namespace paqreg::qsim {

using Amplitude = std::complex<double>;

/// 2x2 unitary, row-major.
struct Mat2 {
  Amplitude m00, m01, m10, m11;
};

namespace serial {

void apply_1q(std::span<Amplitude> amps, unsigned target, const Mat2& u);
void apply_diag(std::span<Amplitude> amps, unsigned target, Amplitude d0, Amplitude d1);
void apply_cnot(std::span<Amplitude> amps, unsigned control, unsigned target);
void apply_cz(std::span<Amplitude> amps, unsigned a, unsigned b);
double expectation_z(std::span<const Amplitude> amps, unsigned q);
double norm_squared(std::span<const Amplitude> amps);
/// <bra| P_q |ket> for P in {'X','Y','Z'}.
Amplitude inner_pauli(std::span<const Amplitude> bra, std::span<const Amplitude> ket, unsigned q,
                      char pauli);

}  // namespace serial

namespace parallel {

void apply_1q(std::span<Amplitude> amps, unsigned target, const Mat2& u);
void apply_diag(std::span<Amplitude> amps, unsigned target, Amplitude d0, Amplitude d1);
void apply_cnot(std::span<Amplitude> amps, unsigned control, unsigned target);
void apply_cz(std::span<Amplitude> amps, unsigned a, unsigned b);
double expectation_z(std::span<const Amplitude> amps, unsigned q);
double norm_squared(std::span<const Amplitude> amps);
Amplitude inner_pauli(std::span<const Amplitude> bra, std::span<const Amplitude> ket, unsigned q,
                      char pauli);

/// States with fewer amplitudes than this run the loops on one thread.
std::size_t min_parallel_dim();
void set_min_parallel_dim(std::size_t dim);

}  // namespace parallel

/// Index of the k-th basis state whose bit `t` is zero.
inline std::size_t insert_zero_bit(std::size_t k, unsigned t) {
  const std::size_t low = k & ((std::size_t{1} << t) - 1);
  return ((k >> t) << (t + 1)) | low;
}

}  // namespace paqreg::qsim
