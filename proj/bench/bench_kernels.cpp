// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "paqreg/chem.hpp"
#include "paqreg/qsim/kernels.hpp"
#include "paqreg/qsim/qsim.hpp"

using namespace paqreg;
using namespace paqreg::qsim;

namespace {

std::vector<Amplitude> random_state(unsigned n) {
  Rng rng(n);
  std::vector<Amplitude> a(std::size_t{1} << n);
  for (auto& x : a) x = {rng.normal(), rng.normal()};
  return a;
}

template <void (*Apply)(std::span<Amplitude>, unsigned, const Mat2&)>
void BM_apply_1q(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  auto amps = random_state(n);
  const Mat2 u = gate_matrix(GateKind::RY, 0.3);
  unsigned q = 0;
  for (auto _ : state) {
    Apply(amps, q, u);
    q = (q + 1) % n;
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(amps.size()));
}

template <void (*Apply)(std::span<Amplitude>, unsigned, unsigned)>
void BM_apply_cnot(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  auto amps = random_state(n);
  unsigned q = 0;
  for (auto _ : state) {
    Apply(amps, q, (q + 1) % n);
    q = (q + 1) % n;
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(amps.size()));
}

template <double (*Expect)(std::span<const Amplitude>, unsigned)>
void BM_expectation_z(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto amps = random_state(n);
  for (auto _ : state) benchmark::DoNotOptimize(Expect(amps, n / 2));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(amps.size()));
}

template <chem::SimilarityStats (*Stats)(std::span<const chem::Fingerprint>)>
void BM_pairwise_similarity(benchmark::State& state) {
  Rng rng(1);
  std::vector<chem::Fingerprint> fps;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    chem::Fingerprint fp(1024);
    for (std::size_t b = 0; b < 1024; ++b)
      if (rng.uniform() < 0.1) fp.set(b);
    fps.push_back(fp);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Stats(fps));
  state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2);
}

}  // namespace

BENCHMARK(BM_apply_1q<serial::apply_1q>)->Name("apply_1q/serial")->DenseRange(10, 22, 4);
BENCHMARK(BM_apply_1q<parallel::apply_1q>)->Name("apply_1q/omp")->DenseRange(10, 22, 4)->UseRealTime();
BENCHMARK(BM_apply_cnot<serial::apply_cnot>)->Name("apply_cnot/serial")->DenseRange(10, 22, 4);
BENCHMARK(BM_apply_cnot<parallel::apply_cnot>)->Name("apply_cnot/omp")->DenseRange(10, 22, 4)->UseRealTime();
BENCHMARK(BM_expectation_z<serial::expectation_z>)->Name("expectation_z/serial")->DenseRange(10, 22, 4);
BENCHMARK(BM_expectation_z<parallel::expectation_z>)->Name("expectation_z/omp")->DenseRange(10, 22, 4)->UseRealTime();
BENCHMARK(BM_pairwise_similarity<chem::serial::mean_pairwise_similarity>)
    ->Name("pairwise_similarity/serial")
    ->Arg(500)
    ->Arg(2000);
BENCHMARK(BM_pairwise_similarity<chem::mean_pairwise_similarity>)
    ->Name("pairwise_similarity/omp")
    ->Arg(500)
    ->Arg(2000)
    ->UseRealTime();

BENCHMARK_MAIN();
