#include <benchmark/benchmark.h>

#include "chshlab/chsh.hpp"
#include "chshlab/ensembles.hpp"
#include "chshlab/qcore.hpp"
#include "chshlab/resources.hpp"
#include "chshlab/rng.hpp"
#include "chshlab/twirling.hpp"

namespace {

using namespace chshlab;

void BM_HaarState(benchmark::State& state) {
  Xoshiro256pp rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(haar_state(rng));
  }
}
BENCHMARK(BM_HaarState);

void BM_HaarUnitary4(benchmark::State& state) {
  Xoshiro256pp rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(haar_unitary4(rng));
  }
}
BENCHMARK(BM_HaarUnitary4);

void BM_PauliExpectations(benchmark::State& state) {
  Xoshiro256pp rng(1, 0);
  const StateVec psi = haar_state(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pauli_expectations(psi));
  }
}
BENCHMARK(BM_PauliExpectations);

void BM_BOfUnitary(benchmark::State& state) {
  Xoshiro256pp rng(1, 0);
  const Mat4 u = haar_unitary4(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(b_of_unitary(u));
  }
}
BENCHMARK(BM_BOfUnitary);

void BM_StabilizerEntropyPure(benchmark::State& state) {
  Xoshiro256pp rng(1, 0);
  const StateVec psi = haar_state(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stabilizer_entropy_pure(psi));
  }
}
BENCHMARK(BM_StabilizerEntropyPure);

void BM_ResourceReport(benchmark::State& state) {
  Xoshiro256pp rng(1, 0);
  const StateVec psi = haar_state(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resource_report(psi));
  }
}
BENCHMARK(BM_ResourceReport);

void BM_CliffordConjugationSweep(benchmark::State& state) {
  const Mat4 core = w_gate(kPi / 4.0);
  EnsembleSpec spec;
  spec.core = core;
  spec.group = {GroupKind::c_a, Method::exact_enumeration};
  spec.n_samples = 0;
  spec.seed = 0;
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 24; ++i)
      acc += b_of_unitary(draw_ensemble_element(spec, i));
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_CliffordConjugationSweep);

void BM_EnsembleStatsMc(benchmark::State& state) {
  EnsembleSpec spec;
  spec.core = w_gate(kPi / 4.0);
  spec.group = {GroupKind::u_full, Method::monte_carlo};
  spec.n_samples = static_cast<std::size_t>(state.range(0));
  spec.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ensemble_stats(spec, 1));
  }
}
BENCHMARK(BM_EnsembleStatsMc)->Arg(1000)->Arg(10000);

void BM_CliffordVarClosedForm(benchmark::State& state) {
  const Mat4 core = w_gate(kPi / 4.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clifford_var_b(core));
  }
}
BENCHMARK(BM_CliffordVarClosedForm);

}  // namespace

BENCHMARK_MAIN();
