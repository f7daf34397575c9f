#include <atomic>
#include <cstdint>

#include "paqreg/qsim/kernels.hpp"

namespace paqreg::qsim::parallel {

namespace {

std::atomic<std::size_t> g_min_parallel_dim{std::size_t{1} << 14};

inline bool go_parallel(std::size_t dim) { return dim >= g_min_parallel_dim.load(std::memory_order_relaxed); }

// Explicit arithmetic keeps the inner loops free of the NaN-recovery path
// that std::complex multiplication carries.
inline void mul_add(double ar, double ai, double br, double bi, double& cr, double& ci) {
  cr += ar * br - ai * bi;
  ci += ar * bi + ai * br;
}

}  // namespace

std::size_t min_parallel_dim() { return g_min_parallel_dim.load(); }
void set_min_parallel_dim(std::size_t dim) { g_min_parallel_dim.store(dim); }

void apply_1q(std::span<Amplitude> amps, unsigned target, const Mat2& u) {
  const auto half = static_cast<std::int64_t>(amps.size() / 2);
  const std::size_t bit = std::size_t{1} << target;
  auto* a = reinterpret_cast<double*>(amps.data());
  const double u00r = u.m00.real(), u00i = u.m00.imag(), u01r = u.m01.real(), u01i = u.m01.imag();
  const double u10r = u.m10.real(), u10i = u.m10.imag(), u11r = u.m11.real(), u11i = u.m11.imag();
#pragma omp parallel for schedule(static) if (go_parallel(amps.size()))
  for (std::int64_t k = 0; k < half; ++k) {
    const std::size_t i0 = insert_zero_bit(static_cast<std::size_t>(k), target);
    const std::size_t i1 = i0 | bit;
    const double a0r = a[2 * i0], a0i = a[2 * i0 + 1];
    const double a1r = a[2 * i1], a1i = a[2 * i1 + 1];
    double r0 = 0, j0 = 0, r1 = 0, j1 = 0;
    mul_add(u00r, u00i, a0r, a0i, r0, j0);
    mul_add(u01r, u01i, a1r, a1i, r0, j0);
    mul_add(u10r, u10i, a0r, a0i, r1, j1);
    mul_add(u11r, u11i, a1r, a1i, r1, j1);
    a[2 * i0] = r0;
    a[2 * i0 + 1] = j0;
    a[2 * i1] = r1;
    a[2 * i1 + 1] = j1;
  }
}

void apply_diag(std::span<Amplitude> amps, unsigned target, Amplitude d0, Amplitude d1) {
  const auto half = static_cast<std::int64_t>(amps.size() / 2);
  const std::size_t bit = std::size_t{1} << target;
  auto* a = reinterpret_cast<double*>(amps.data());
  const double d0r = d0.real(), d0i = d0.imag(), d1r = d1.real(), d1i = d1.imag();
#pragma omp parallel for schedule(static) if (go_parallel(amps.size()))
  for (std::int64_t k = 0; k < half; ++k) {
    const std::size_t i0 = insert_zero_bit(static_cast<std::size_t>(k), target);
    const std::size_t i1 = i0 | bit;
    const double a0r = a[2 * i0], a0i = a[2 * i0 + 1];
    const double a1r = a[2 * i1], a1i = a[2 * i1 + 1];
    a[2 * i0] = d0r * a0r - d0i * a0i;
    a[2 * i0 + 1] = d0r * a0i + d0i * a0r;
    a[2 * i1] = d1r * a1r - d1i * a1i;
    a[2 * i1 + 1] = d1r * a1i + d1i * a1r;
  }
}

void apply_cnot(std::span<Amplitude> amps, unsigned control, unsigned target) {
  const auto quarter = static_cast<std::int64_t>(amps.size() / 4);
  const unsigned lo = control < target ? control : target;
  const unsigned hi = control < target ? target : control;
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
#pragma omp parallel for schedule(static) if (go_parallel(amps.size()))
  for (std::int64_t k = 0; k < quarter; ++k) {
    const std::size_t base = insert_zero_bit(insert_zero_bit(static_cast<std::size_t>(k), lo), hi);
    const std::size_t i0 = base | cbit;
    const Amplitude tmp = amps[i0];
    amps[i0] = amps[i0 | tbit];
    amps[i0 | tbit] = tmp;
  }
}

void apply_cz(std::span<Amplitude> amps, unsigned a, unsigned b) {
  const auto quarter = static_cast<std::int64_t>(amps.size() / 4);
  const unsigned lo = a < b ? a : b;
  const unsigned hi = a < b ? b : a;
  const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
#pragma omp parallel for schedule(static) if (go_parallel(amps.size()))
  for (std::int64_t k = 0; k < quarter; ++k) {
    const std::size_t i = insert_zero_bit(insert_zero_bit(static_cast<std::size_t>(k), lo), hi) | mask;
    amps[i] = -amps[i];
  }
}

double expectation_z(std::span<const Amplitude> amps, unsigned q) {
  const auto half = static_cast<std::int64_t>(amps.size() / 2);
  const std::size_t bit = std::size_t{1} << q;
  double e = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : e) if (go_parallel(amps.size()))
  for (std::int64_t k = 0; k < half; ++k) {
    const std::size_t i0 = insert_zero_bit(static_cast<std::size_t>(k), q);
    e += std::norm(amps[i0]) - std::norm(amps[i0 | bit]);
  }
  return e;
}

double norm_squared(std::span<const Amplitude> amps) {
  const auto n = static_cast<std::int64_t>(amps.size());
  double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s) if (go_parallel(amps.size()))
  for (std::int64_t i = 0; i < n; ++i) s += std::norm(amps[i]);
  return s;
}

Amplitude inner_pauli(std::span<const Amplitude> bra, std::span<const Amplitude> ket, unsigned q,
                      char pauli) {
  const auto half = static_cast<std::int64_t>(ket.size() / 2);
  const std::size_t bit = std::size_t{1} << q;
  const auto* b = reinterpret_cast<const double*>(bra.data());
  const auto* k = reinterpret_cast<const double*>(ket.data());
  double re = 0.0, im = 0.0;
  // conj(b) * c accumulated as (br*cr + bi*ci) + i(br*ci - bi*cr).
#pragma omp parallel for schedule(static) reduction(+ : re, im) if (go_parallel(ket.size()))
  for (std::int64_t j = 0; j < half; ++j) {
    const std::size_t i0 = insert_zero_bit(static_cast<std::size_t>(j), q);
    const std::size_t i1 = i0 | bit;
    const double b0r = b[2 * i0], b0i = b[2 * i0 + 1], b1r = b[2 * i1], b1i = b[2 * i1 + 1];
    const double k0r = k[2 * i0], k0i = k[2 * i0 + 1], k1r = k[2 * i1], k1i = k[2 * i1 + 1];
    double c0r, c0i, c1r, c1i;  // (P ket) at i0, i1
    switch (pauli) {
      case 'X':
        c0r = k1r, c0i = k1i, c1r = k0r, c1i = k0i;
        break;
      case 'Y':  // Y|0> = i|1>, Y|1> = -i|0>
        c0r = k1i, c0i = -k1r, c1r = -k0i, c1i = k0r;
        break;
      default:
        c0r = k0r, c0i = k0i, c1r = -k1r, c1i = -k1i;
        break;
    }
    re += b0r * c0r + b0i * c0i + b1r * c1r + b1i * c1i;
    im += b0r * c0i - b0i * c0r + b1r * c1i - b1i * c1r;
  }
  return {re, im};
}

}  // namespace paqreg::qsim::parallel
