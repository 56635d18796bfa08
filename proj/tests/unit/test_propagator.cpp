#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qdent/propagator.hpp"

using namespace qdent;
using Catch::Matchers::WithinAbs;

namespace {

const DriveWaveform kCosine{DriveKind::Cosine, 0.48, 4.0};
const DriveWaveform kNone{DriveKind::None, 0.0, 4.0};

PropagatorConfig unit_config(double dt) {
  PropagatorConfig cfg;
  cfg.dt = dt;
  return cfg;
}

}  // namespace

TEST_CASE("zero Hamiltonian leaves the state unchanged", "[propagator]") {
  std::mt19937_64 rng(8);
  const auto psi = test::random_state(rng, 6);
  for (double alpha : {0.0, 1.0, 2.5}) {
    auto cfg = unit_config(0.1);
    cfg.alpha = alpha;
    const auto [out, report] = laguerre_step(ComplexMatrix::Zero(6, 6), psi, cfg);
    CHECK((out - psi).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(report.norm_drift < 1e-14);
  }
}

TEST_CASE("Laguerre step on sz reproduces the scalar phase", "[propagator]") {
  StateVector ket0(2);
  ket0 << 1.0, 0.0;
  const auto [out, report] = laguerre_step(pauli::z(), ket0, unit_config(0.1));
  CHECK(std::abs(out[0] - std::exp(Complex(0.0, -0.1))) < 1e-10);
  CHECK(std::abs(out[1]) < 1e-10);
  CHECK(report.tail_estimate >= 0.0);
}

TEST_CASE("Laguerre step matches the oracle at default parameters", "[propagator]") {
  const ModelParams p;
  CHECK(p.dim() == 48);
  const auto h0 = build_static_hamiltonian(p);
  std::mt19937_64 rng(9);
  const auto psi = test::random_state(rng, p.dim());

  PropagatorConfig cfg = calibrate_step(p, kNone, PropagatorConfig{});
  cfg.dt = 0.1;
  const auto [out, report] = laguerre_step(h0, psi, cfg);
  CHECK((out - oracle_step(h0, psi, 0.1)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(report.norm_drift <= 1e-10);
}

TEST_CASE("Laguerre step rejects an oversized step", "[propagator]") {
  const ModelParams p;
  const auto h0 = build_static_hamiltonian(p);
  auto cfg = unit_config(5.0);
  CHECK_THROWS_AS(laguerre_step(h0, build_initial_state({}, p.n_fock), cfg), StepTooLargeError);
  ComplexMatrix nonherm = h0;
  nonherm(0, 1) += 1.0;
  CHECK_THROWS_AS(laguerre_step(nonherm, build_initial_state({}, p.n_fock), unit_config(0.1)),
                  ContractViolation);
}

TEST_CASE("oracle step", "[propagator]") {
  std::mt19937_64 rng(10);
  const auto h = test::random_hermitian(rng, 12);
  const auto psi = test::random_state(rng, 12);
  CHECK(oracle_step(h, psi, 0.0) == psi);

  const auto twice = oracle_step(h, oracle_step(h, psi, 0.3), 0.3);
  CHECK((twice - oracle_step(h, psi, 0.6)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(oracle_step(h, psi, 7.0).norm() - 1.0) <= 1e-12);

  // exp(-i sx pi/2) = -i sx
  StateVector ket0(2);
  ket0 << 1.0, 0.0;
  const auto out = oracle_step(pauli::x(), ket0, std::numbers::pi / 2.0);
  CHECK(std::abs(out[0]) <= 1e-12);
  CHECK(std::abs(out[1] - Complex(0.0, -1.0)) <= 1e-12);
}

TEST_CASE("RK4 step converges to the oracle at fourth order", "[propagator]") {
  std::mt19937_64 rng(11);
  const auto h = test::random_hermitian(rng, 8);
  const auto psi = test::random_state(rng, 8);
  auto err = [&](int n) {
    StateVector v = psi;
    for (int k = 0; k < n; ++k) v = rk4_step(h, v, 1.0 / n);
    return (v - oracle_step(h, psi, 1.0)).norm();
  };
  const double ratio = err(20) / err(40);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("driven Hamiltonian operator matches the dense matrix", "[propagator]") {
  const ModelParams p;
  DrivenHamiltonian op(p);
  op.set_field(0.31);
  const ComplexMatrix dense = build_total_hamiltonian(p, kCosine, 0.0) -
                              0.48 * build_drive_operator(p) + 0.31 * build_drive_operator(p);
  CHECK(test::max_err(op.dense(), dense) < 1e-15);
  std::mt19937_64 rng(12);
  const auto v = test::random_state(rng, p.dim());
  StateVector out;
  op.apply(v, out);
  CHECK((out - dense * v).cwiseAbs().maxCoeff() < 1e-14);

  // Complex static part takes the generic path.
  const auto hc = test::random_hermitian(rng, 6);
  DrivenHamiltonian opc(hc, RealVector::Ones(6));
  opc.set_field(0.5);
  opc.apply(v.head(6), out);
  const ComplexMatrix expected = hc + 0.5 * ComplexMatrix::Identity(6, 6);
  CHECK((out - expected * v.head(6)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("calibration at default parameters", "[propagator]") {
  const ModelParams p;
  const auto cfg = calibrate_step(p, kCosine, PropagatorConfig{});
  CHECK(cfg.dt >= 0.05);
  CHECK(cfg.dt <= 1.0);
  // Regression pin from the first calibration run.
  CHECK(cfg.dt == 0.125);
  CHECK(cfg.scale > 0.0);
  CHECK(cfg.k_max == 20);

  // The spectral window covers both extreme-field Hamiltonians.
  for (double f : {0.48, -0.48}) {
    ComplexMatrix h = build_static_hamiltonian(p);
    h.diagonal() += (f * drive_operator_diagonal(p)).cast<Complex>();
    const auto es = hermitian_eigendecompose(h);
    CHECK(es.values.minCoeff() >= cfg.shift - cfg.scale - 1e-12);
    CHECK(es.values.maxCoeff() <= cfg.shift + cfg.scale + 1e-12);
  }
}

TEST_CASE("calibration leaves dt alone for trivial spectra", "[propagator]") {
  ModelParams p;
  p.g = 0.0;
  p.delta = 0.0;
  p.epsilon = 0.0;
  CHECK(calibrate_step(p, kNone, PropagatorConfig{}).dt == 1.0);
  p.omega = 0.0;
  const auto cfg = calibrate_step(p, kNone, PropagatorConfig{});
  CHECK(cfg.dt == 1.0);
  CHECK(cfg.scale > 0.0);
}

TEST_CASE("doubling energy scales halves the calibrated step", "[propagator]") {
  const ModelParams p;
  ModelParams doubled = p;
  doubled.epsilon *= 2.0;
  doubled.delta *= 2.0;
  doubled.omega *= 2.0;
  doubled.g *= 2.0;
  DriveWaveform w2 = kCosine;
  w2.amplitude *= 2.0;
  const double dt1 = calibrate_step(p, kCosine, PropagatorConfig{}).dt;
  const double dt2 = calibrate_step(doubled, w2, PropagatorConfig{}).dt;
  CHECK((dt2 == dt1 / 2.0 || dt2 == dt1 / 4.0));
}

TEST_CASE("calibration fails loudly on absurd floors", "[propagator]") {
  CalibrationCriteria impossible;
  impossible.max_tail = 0.0;
  CHECK_THROWS_AS(calibrate_step(ModelParams{}, kCosine, PropagatorConfig{}, impossible),
                  CalibrationError);
}

TEST_CASE("undriven diagonal Hamiltonian never entangles", "[propagator]") {
  ModelParams p;
  p.g = 0.0;
  p.delta = 0.0;
  const auto cfg = calibrate_step(p, kNone, PropagatorConfig{});
  const auto trace = evolve(p, kNone, {QubitLabel(0, 1)}, cfg, 50.0, 1, Stepper::Laguerre);
  for (const auto& s : trace.samples) CHECK(s.concurrence == 0.0);
}

TEST_CASE("Laguerre and oracle traces agree", "[propagator]") {
  const ModelParams p;
  const auto cfg = calibrate_step(p, kCosine, PropagatorConfig{});
  const auto lag = evolve(p, kCosine, {}, cfg, 10.0, 1, Stepper::Laguerre);
  const auto ora = evolve(p, kCosine, {}, cfg, 10.0, 1, Stepper::Oracle);
  CHECK(lag.size() == 81);
  CHECK(has_uniform_grid(lag));
  CHECK(lag.samples.front().t == 0.0);
  CHECK_THAT(lag.samples.back().t, WithinAbs(10.0, 1e-12));
  CHECK(trace_compare(lag, ora) <= 1e-7);
}

TEST_CASE("n Laguerre steps equal one oracle application", "[propagator]") {
  std::mt19937_64 rng(13);
  for (int n_fock : {2, 5, 12}) {
    ModelParams p;
    p.n_fock = n_fock;
    const auto h = build_static_hamiltonian(p);
    const auto cfg = calibrate_step(p, kNone, PropagatorConfig{});
    const auto psi0 = test::random_state(rng, p.dim());
    StateVector psi = psi0;
    LaguerreStepper stepper(cfg);
    const int n = 40;
    for (int k = 0; k < n; ++k) stepper.step(h, psi, cfg.dt);
    CHECK((psi - oracle_step(h, psi0, n * cfg.dt)).cwiseAbs().maxCoeff() <= n * 1e-9);
    CHECK(stepper.matvecs() == n * cfg.k_max);
  }
}

TEST_CASE("long Laguerre runs stay unitary", "[propagator]") {
  const ModelParams p;
  const auto cfg = calibrate_step(p, kCosine, PropagatorConfig{});
  StateVector psi = build_initial_state({}, p.n_fock);
  const auto stats = propagate(p, kCosine, psi, cfg, 20000 * cfg.dt, Stepper::Laguerre);
  CHECK(stats.steps == 20000);
  CHECK(stats.max_tail < cfg.tail_threshold);
  CHECK(std::abs(psi.norm() - 1.0) <= 1e-6);
}

TEST_CASE("energy is conserved without drive", "[propagator]") {
  const ModelParams p;
  const auto cfg = calibrate_step(p, kNone, PropagatorConfig{});
  const auto h = build_static_hamiltonian(p);
  StateVector psi = build_initial_state({QubitLabel(1, 1)}, p.n_fock);
  const double e0 = psi.dot(h * psi).real();
  double worst = 0.0;
  propagate(p, kNone, psi, cfg, 1000.0, Stepper::Laguerre,
            [&](std::int64_t, double, const StateVector& s) {
              worst = std::max(worst, std::abs(s.dot(h * s).real() - e0));
            });
  CHECK(worst <= 1e-6);
}

TEST_CASE("shift and scale do not change the physics", "[propagator]") {
  const ModelParams p;
  const auto scaled = calibrate_step(p, kNone, PropagatorConfig{});
  const auto plain = unit_config(scaled.dt / 4.0);
  const auto h = build_static_hamiltonian(p);
  std::mt19937_64 rng(14);
  const auto psi0 = test::random_state(rng, p.dim());
  StateVector a = psi0, b = psi0;
  LaguerreStepper sa(scaled), sb(plain);
  for (int k = 0; k < 40; ++k) sa.step(h, a, scaled.dt);
  for (int k = 0; k < 160; ++k) sb.step(h, b, plain.dt);
  CHECK(std::abs(a.dot(b)) >= 1.0 - 1e-8);
}

TEST_CASE("results do not depend on the Laguerre type", "[propagator]") {
  const ModelParams p;
  auto cfg = calibrate_step(p, kCosine, PropagatorConfig{});
  const auto base = evolve(p, kCosine, {}, cfg, 10.0, 1, Stepper::Laguerre);
  for (double alpha : {1.0, 2.0}) {
    cfg.alpha = alpha;
    CHECK(trace_compare(base, evolve(p, kCosine, {}, cfg, 10.0, 1, Stepper::Laguerre)) <= 1e-8);
  }
}

TEST_CASE("midpoint sampling is second order", "[propagator]") {
  const ModelParams p;
  auto c_at = [&](double dt, Sampling sampling) {
    auto cfg = unit_config(dt);
    cfg.sampling = sampling;
    StateVector psi = build_initial_state({}, p.n_fock);
    propagate(p, kCosine, psi, cfg, 100.0, Stepper::Oracle);
    return concurrence(reduced_density_matrix(psi, p.layout()));
  };
  const double ref = c_at(0.0625, Sampling::Midpoint);
  const double ratio =
      std::abs(c_at(0.5, Sampling::Midpoint) - ref) / std::abs(c_at(0.25, Sampling::Midpoint) - ref);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.5);

  // Left sampling is less accurate at the same step.
  const double left_err = std::abs(c_at(0.25, Sampling::Left) - ref);
  CHECK(left_err > std::abs(c_at(0.25, Sampling::Midpoint) - ref));
}

TEST_CASE("Magnus sampling is fourth order", "[propagator]") {
  const ModelParams p;
  auto c_at = [&](double dt) {
    auto cfg = unit_config(dt);
    cfg.sampling = Sampling::Magnus4;
    StateVector psi = build_initial_state({}, p.n_fock);
    propagate(p, kCosine, psi, cfg, 100.0, Stepper::Oracle);
    return concurrence(reduced_density_matrix(psi, p.layout()));
  };
  const double ref = c_at(0.0625);
  const double ratio = std::abs(c_at(0.5) - ref) / std::abs(c_at(0.25) - ref);
  CHECK(ratio > 12.0);
  CHECK(ratio < 24.0);
}

TEST_CASE("Magnus sampling with Laguerre matches the oracle", "[propagator]") {
  const ModelParams p;
  PropagatorConfig cfg;
  cfg.sampling = Sampling::Magnus4;
  cfg = calibrate_step(p, kCosine, cfg);
  CHECK(to_string(cfg.sampling) == "magnus4");
  const auto lag = evolve(p, kCosine, {}, cfg, 20.0, 1, Stepper::Laguerre);
  const auto ora = evolve(p, kCosine, {}, cfg, 20.0, 1, Stepper::Oracle);
  CHECK(trace_compare(lag, ora) <= 1e-7);
  // Constant fields reduce to the ordinary step.
  auto mid = cfg;
  mid.sampling = Sampling::Midpoint;
  CHECK(trace_compare(evolve(p, kNone, {}, cfg, 20.0, 1, Stepper::Oracle),
                      evolve(p, kNone, {}, mid, 20.0, 1, Stepper::Oracle)) <= 1e-10);
}

TEST_CASE("final step lands on t_end", "[propagator]") {
  const ModelParams p;
  auto cfg = calibrate_step(p, kCosine, PropagatorConfig{});
  StateVector psi = build_initial_state({}, p.n_fock);
  double last_t = 0.0;
  const auto stats = propagate(p, kCosine, psi, cfg, 1.3, Stepper::Laguerre,
                               [&](std::int64_t, double t, const StateVector&) { last_t = t; });
  CHECK(stats.steps == 11);
  CHECK(stats.step_size <= cfg.dt);
  CHECK_THAT(last_t, WithinAbs(1.3, 1e-14));
}

TEST_CASE("non-finite states are reported with their time", "[propagator]") {
  ModelParams p;
  p.epsilon = 1e308;
  auto cfg = unit_config(0.1);
  cfg.tail_threshold = std::numeric_limits<double>::infinity();
  StateVector psi = build_initial_state({}, p.n_fock);
  try {
    propagate(p, kNone, psi, cfg, 1.0, Stepper::Laguerre);
    FAIL("expected NumericFailure");
  } catch (const NumericFailure& e) {
    CHECK(e.t > 0.0);
  }
}

TEST_CASE("invalid propagation settings", "[propagator]") {
  const ModelParams p;
  StateVector psi = build_initial_state({}, p.n_fock);
  CHECK_THROWS_AS(propagate(p, kCosine, psi, unit_config(0.1), -1.0, Stepper::Laguerre),
                  ContractViolation);
  auto bad = unit_config(0.1);
  bad.k_max = 0;
  CHECK_THROWS_AS(propagate(p, kCosine, psi, bad, 1.0, Stepper::Laguerre), ContractViolation);
  CHECK_THROWS_AS(evolve(p, kCosine, {}, unit_config(0.1), 1.0, 0, Stepper::Laguerre),
                  ContractViolation);
}
