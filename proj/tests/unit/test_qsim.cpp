#include <cmath>
#include <numbers>

#include "doctest.h"

#include "oracles.hpp"
#include "paqreg/qsim/qsim.hpp"

using namespace paqreg;
using namespace paqreg::qsim;
using std::numbers::pi;

namespace {

Statevector random_state(unsigned n, Rng& rng) {
  std::vector<Amplitude> a(std::size_t{1} << n);
  double s = 0;
  for (auto& x : a) {
    x = {rng.normal(), rng.normal()};
    s += std::norm(x);
  }
  for (auto& x : a) x /= std::sqrt(s);
  return Statevector::from_amplitudes(n, a);
}

double max_diff(std::span<const Amplitude> a, std::span<const Amplitude> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

CircuitSpec one_qubit(GateOp g, std::size_t nf, std::size_t np) {
  CircuitSpec c;
  c.n_qubits = 1;
  c.gates = {g};
  c.n_feature_slots = nf;
  c.n_param_slots = np;
  return c;
}

}  // namespace

TEST_CASE("single gates on basis states") {
  const double r = 1.0 / std::sqrt(2.0);
  Statevector s(1);
  apply_gate(s, GateOp::fixed(GateKind::X, 0));
  CHECK(s[1] == Amplitude(1, 0));

  Statevector h(1);
  apply_gate(h, GateOp::fixed(GateKind::H, 0));
  CHECK(std::abs(h[0] - r) < 1e-15);
  CHECK(std::abs(h[1] - r) < 1e-15);

  Statevector ry(1);
  apply_gate(ry, GateOp::trainable(GateKind::RY, 0, 0), pi);
  CHECK(std::abs(ry[0]) < 1e-15);
  CHECK(std::abs(ry[1] - Amplitude(1, 0)) < 1e-15);

  // |10> is q0 = 1, q1 = 0: basis index 1. CNOT(0 -> 1) gives |11>, index 3.
  Statevector b(2);
  apply_gate(b, GateOp::fixed(GateKind::X, 0));
  apply_gate(b, GateOp::fixed(GateKind::CNOT, 0, 1));
  CHECK(b[3] == Amplitude(1, 0));
  CHECK(b.norm_squared() == 1.0);

  Statevector bad(2);
  CHECK_THROWS_AS(apply_gate(bad, GateOp::fixed(GateKind::X, 2)), InputError);
  CHECK_THROWS_AS(apply_gate(bad, GateOp::fixed(GateKind::CNOT, 1, 1)), InputError);
  CHECK_THROWS_AS(apply_gate(bad, GateOp::trainable(GateKind::RX, 0, 0)), InputError);
  CHECK_THROWS_AS(apply_gate(bad, GateOp::fixed(GateKind::H, 0), 0.3), InputError);
  CHECK_THROWS_AS(Statevector(17), InputError);
}

TEST_CASE("gate matrices agree with a dense reference and invert") {
  Rng rng(8);
  const GateKind kinds[] = {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::RX, GateKind::RY, GateKind::RZ};
  for (GateKind k : kinds)
    for (unsigned q = 0; q < 4; ++q) {
      const double angle = rng.uniform(-pi, pi);
      auto s = random_state(4, rng);
      const std::vector<Amplitude> before(s.amplitudes().begin(), s.amplitudes().end());
      const GateOp g = is_rotation(k) ? GateOp::trainable(k, q, 0) : GateOp::fixed(k, q);
      const auto angle_opt = is_rotation(k) ? std::optional<double>(angle) : std::nullopt;
      apply_gate(s, g, angle_opt);
      const auto ref = oracle::apply_dense(before, gate_matrix(k, angle), q);
      CHECK(max_diff(s.amplitudes(), ref) < 1e-14);
      apply_gate_inverse(s, g, angle_opt);
      CHECK(max_diff(s.amplitudes(), before) < 1e-12);
    }
  for (GateKind k : {GateKind::CNOT, GateKind::CZ}) {
    auto s = random_state(3, rng);
    const std::vector<Amplitude> before(s.amplitudes().begin(), s.amplitudes().end());
    apply_gate(s, GateOp::fixed(k, 2, 0));
    apply_gate_inverse(s, GateOp::fixed(k, 2, 0));
    CHECK(max_diff(s.amplitudes(), before) < 1e-12);
  }
}

TEST_CASE("serial and parallel kernels agree bitwise") {
  const auto saved = parallel::min_parallel_dim();
  parallel::set_min_parallel_dim(2);
  Rng rng(17);
  auto a = random_state(9, rng);
  auto b = a;
  const Mat2 u = gate_matrix(GateKind::RY, 0.37);
  for (unsigned q = 0; q < 9; ++q) {
    serial::apply_1q(a.amplitudes(), q, u);
    parallel::apply_1q(b.amplitudes(), q, u);
    serial::apply_diag(a.amplitudes(), q, {0.6, 0.8}, {0.8, -0.6});
    parallel::apply_diag(b.amplitudes(), q, {0.6, 0.8}, {0.8, -0.6});
    serial::apply_cnot(a.amplitudes(), q, (q + 3) % 9);
    parallel::apply_cnot(b.amplitudes(), q, (q + 3) % 9);
    serial::apply_cz(a.amplitudes(), q, (q + 5) % 9);
    parallel::apply_cz(b.amplitudes(), q, (q + 5) % 9);
  }
  CHECK(max_diff(a.amplitudes(), b.amplitudes()) == 0.0);
  for (unsigned q = 0; q < 9; ++q) {
    CHECK(std::abs(serial::expectation_z(a.amplitudes(), q) - parallel::expectation_z(b.amplitudes(), q)) < 1e-14);
    for (char p : {'X', 'Y', 'Z'})
      CHECK(std::abs(serial::inner_pauli(a.amplitudes(), b.amplitudes(), q, p) -
                     parallel::inner_pauli(a.amplitudes(), b.amplitudes(), q, p)) < 1e-14);
  }
  parallel::set_min_parallel_dim(saved);
}

TEST_CASE("norm is preserved by long random circuits") {
  Rng rng(2);
  for (unsigned n : {1u, 4u, 10u}) {
    const auto c = random_circuit(n, 200, 0, 0, rng);
    Statevector s(n);
    for (const auto& g : c.gates) apply_gate(s, g);
    CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
    for (double e : s.expectations_z()) CHECK(std::abs(e) <= 1.0 + 1e-12);
  }
}

TEST_CASE("run_circuit examples") {
  const auto c = one_qubit(GateOp::encoding(GateKind::RY, 0, 0), 1, 0);
  CHECK(run_circuit(c, std::vector{0.0}, {}).values[0] == 1.0);
  CHECK(std::abs(run_circuit(c, std::vector{pi / 3}, {}).values[0] - 0.5) < 1e-12);
  CHECK_THROWS_AS(run_circuit(c, std::vector{0.0, 1.0}, {}), InputError);
  CHECK_THROWS_AS(run_circuit(c, {}, {}), InputError);

  CircuitSpec bell;
  bell.n_qubits = 2;
  bell.gates = {GateOp::fixed(GateKind::H, 0), GateOp::fixed(GateKind::CNOT, 0, 1)};
  const auto e = run_circuit(bell, {}, {}).values;
  CHECK(std::abs(e[0]) < 1e-12);
  CHECK(std::abs(e[1]) < 1e-12);
}

TEST_CASE("parameter-shift gradient examples") {
  const auto c = one_qubit(GateOp::trainable(GateKind::RY, 0, 0), 0, 1);
  CHECK(std::abs(grad_param_shift(c, {}, std::vector{pi / 2})(0, 0) + 1.0) < 1e-12);
  CHECK(std::abs(grad_param_shift(c, {}, std::vector{0.0})(0, 0)) < 1e-12);

  CircuitSpec none;
  none.n_qubits = 2;
  none.gates = {GateOp::fixed(GateKind::H, 0)};
  const auto adj = grad_adjoint(none, {}, {});
  CHECK(adj.params.cols == 0);
}

TEST_CASE("adjoint, parameter-shift and finite differences agree") {
  Rng rng(1234);
  for (int t = 0; t < 25; ++t) {
    const unsigned n = 1 + static_cast<unsigned>(rng.below(5));
    const std::size_t nf = 1 + rng.below(4), np = 1 + rng.below(20);
    const auto c = random_circuit(n, rng.below(15), nf, np, rng);
    std::vector<double> f(nf), p(np);
    for (auto& v : f) v = rng.uniform(-pi, pi);
    for (auto& v : p) v = rng.uniform(-pi, pi);
    const auto ps = grad_param_shift(c, f, p);
    const auto adj = grad_adjoint(c, f, p, true);
    for (std::size_t j = 0; j < np; ++j) {
      const auto fd = oracle::central_difference([&] { return run_circuit(c, f, p).values; }, p, j, 1e-4);
      for (unsigned q = 0; q < n; ++q) {
        CHECK(std::abs(ps(q, j) - fd[q]) < 1e-6);
        CHECK(std::abs(adj.params(q, j) - ps(q, j)) < 1e-10);
      }
    }
    for (std::size_t j = 0; j < nf; ++j) {
      const auto fd = oracle::central_difference([&] { return run_circuit(c, f, p).values; }, f, j, 1e-4);
      for (unsigned q = 0; q < n; ++q) CHECK(std::abs(adj.features(q, j) - fd[q]) < 1e-6);
    }

    std::vector<double> up(n);
    for (auto& u : up) u = rng.normal();
    const auto vj = vjp_adjoint(c, f, p, simulate(c, f, p), up, true);
    for (std::size_t j = 0; j < np; ++j) {
      double ref = 0;
      for (unsigned q = 0; q < n; ++q) ref += up[q] * ps(q, j);
      CHECK(std::abs(vj.params[j] - ref) < 1e-10);
    }
  }
}

TEST_CASE("generate_circuit layout") {
  const auto a = generate_circuit(4, 4, 16, 9);
  CHECK(a == generate_circuit(4, 4, 16, 9));
  CHECK(to_json(a).dump() == to_json(generate_circuit(4, 4, 16, 9)).dump());
  CHECK(a.count(GateSource::Encoding) == 4);
  CHECK(a.count(GateSource::Trainable) == 16);

  const auto b = generate_circuit(4, 8, 12, 1);
  CHECK(b.count(GateSource::Encoding) == 8);
  // two encoding layers: the second starts after trainable gates
  std::size_t first_train = b.gates.size(), last_enc = 0;
  for (std::size_t i = 0; i < b.gates.size(); ++i) {
    if (b.gates[i].source == GateSource::Trainable) first_train = std::min(first_train, i);
    if (b.gates[i].source == GateSource::Encoding) last_enc = i;
  }
  CHECK(first_train < last_enc);
  for (const auto& g : b.gates)
    if (g.source == GateSource::Encoding) {
      CHECK(g.kind == GateKind::RY);
      CHECK(g.qubits[0] == static_cast<unsigned>(g.slot) % 4);
    }
}

TEST_CASE("generate_circuit always satisfies the slot invariants") {
  Rng rng(77);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const unsigned n = 1 + static_cast<unsigned>(rng.below(10));
    const std::size_t nf = 1 + rng.below(24), np = 1 + rng.below(64);
    const auto c = generate_circuit(n, nf, np, seed);
    CHECK_NOTHROW(c.validate());
    CHECK(c.n_feature_slots == nf);
    CHECK(c.n_param_slots == np);
    CHECK(c.count(GateSource::Trainable) == np);
  }
}

TEST_CASE("circuit JSON round trip and version check") {
  Rng rng(5);
  const auto c = random_circuit(3, 10, 2, 5, rng);
  const auto j = to_json(c);
  CHECK(j.at("format") == 1);
  CHECK(circuit_from_json(j) == c);
  auto wrong = j;
  wrong["format"] = 2;
  CHECK_THROWS_AS(circuit_from_json(wrong), InputError);
}

TEST_CASE("shot sampling") {
  const auto id = one_qubit(GateOp::encoding(GateKind::RY, 0, 0), 1, 0);
  CHECK(measure_shots(id, std::vector{0.0}, {}, 17, 3).values[0] == 1.0);

  CircuitSpec h;
  h.n_qubits = 1;
  h.gates = {GateOp::fixed(GateKind::H, 0)};
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    within += std::abs(measure_shots(h, {}, {}, 100000, seed).values[0]) < 0.02;
  CHECK(within >= 99);

  Rng rng(6);
  const auto c = random_circuit(3, 6, 1, 3, rng);
  const std::vector<double> f{0.4}, p{0.1, -1.2, 2.0};
  const auto exact = run_circuit(c, f, p).values;
  const auto est = measure_shots(c, f, p, 1000000, 11).values;
  for (std::size_t q = 0; q < exact.size(); ++q) {
    const double sigma = std::sqrt(std::max(1e-12, 1.0 - exact[q] * exact[q]) / 1e6);
    CHECK(std::abs(est[q] - exact[q]) <= 5 * sigma + 1e-12);
  }
  CHECK_THROWS_AS(measure_shots(h, {}, {}, 0, 1), InputError);
}
