#include <benchmark/benchmark.h>

#include "qdent/propagator.hpp"

using namespace qdent;

namespace {

ModelParams with_fock(int n) {
  ModelParams p;
  p.n_fock = n;
  return p;
}

void BM_DrivenApply(benchmark::State& state) {
  const auto p = with_fock(static_cast<int>(state.range(0)));
  DrivenHamiltonian h(p);
  h.set_field(0.3);
  const StateVector in = StateVector::Constant(p.dim(), Complex(0.1, 0.2));
  StateVector out(p.dim());
  for (auto _ : state) {
    h.apply(in, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_DrivenApply)->Arg(12)->Arg(24)->Arg(48);

void BM_LaguerreStep(benchmark::State& state) {
  const auto p = with_fock(static_cast<int>(state.range(0)));
  const auto cfg = calibrate_step(p, DriveWaveform{}, PropagatorConfig{});
  DrivenHamiltonian h(p);
  h.set_field(0.3);
  LaguerreStepper stepper(cfg);
  StateVector psi = build_initial_state({}, p.n_fock);
  for (auto _ : state) benchmark::DoNotOptimize(stepper.step(h, psi, cfg.dt));
}
BENCHMARK(BM_LaguerreStep)->Arg(12)->Arg(24)->Arg(48);

void BM_OracleStep(benchmark::State& state) {
  const auto p = with_fock(static_cast<int>(state.range(0)));
  const auto h = build_static_hamiltonian(p);
  StateVector psi = build_initial_state({}, p.n_fock);
  for (auto _ : state) {
    psi = oracle_step(h, psi, 0.125);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_OracleStep)->Arg(12)->Arg(24);

void BM_Rk4Step(benchmark::State& state) {
  const auto p = with_fock(static_cast<int>(state.range(0)));
  const auto h = build_static_hamiltonian(p);
  StateVector psi = build_initial_state({}, p.n_fock);
  for (auto _ : state) {
    psi = rk4_step(h, psi, 0.01);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_Rk4Step)->Arg(12)->Arg(24);

void BM_Measure(benchmark::State& state) {
  const auto p = with_fock(12);
  StateVector psi = StateVector::Constant(p.dim(), Complex(1.0, 0.5)).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(measure(psi, p.layout(), 0.0));
}
BENCHMARK(BM_Measure);

}  // namespace

BENCHMARK_MAIN();
