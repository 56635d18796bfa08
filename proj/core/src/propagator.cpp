#include "qdent/propagator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>

namespace qdent {

namespace {
const double kSqrt3 = std::sqrt(3.0);
const double kGaussLow = 0.5 - kSqrt3 / 6.0;
const double kGaussHigh = 0.5 + kSqrt3 / 6.0;
const double kMagnusA = 0.25 + kSqrt3 / 6.0;
const double kMagnusB = 0.25 - kSqrt3 / 6.0;
}  // namespace

std::string_view to_string(Sampling s) {
  switch (s) {
    case Sampling::Midpoint: return "midpoint";
    case Sampling::Left: return "left";
    case Sampling::Magnus4: return "magnus4";
  }
  return "unknown";
}

std::string_view to_string(Stepper s) {
  switch (s) {
    case Stepper::Laguerre: return "laguerre";
    case Stepper::Oracle: return "oracle";
    case Stepper::RungeKutta4: return "rk4";
  }
  return "unknown";
}

Sampling parse_sampling(std::string_view text) {
  if (text == "midpoint") return Sampling::Midpoint;
  if (text == "left") return Sampling::Left;
  if (text == "magnus4") return Sampling::Magnus4;
  throw ConfigError("unknown sampling '" + std::string(text) + "'");
}

Stepper parse_stepper(std::string_view text) {
  if (text == "laguerre") return Stepper::Laguerre;
  if (text == "oracle") return Stepper::Oracle;
  if (text == "rk4") return Stepper::RungeKutta4;
  throw ConfigError("unknown stepper '" + std::string(text) + "'");
}

void PropagatorConfig::validate() const {
  if (k_max < 1) throw ContractViolation("k_max must be at least 1");
  if (!(alpha >= 0.0)) throw ContractViolation("alpha must be non-negative");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("dt must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ContractViolation("scale must be positive");
  if (!std::isfinite(shift)) throw ContractViolation("shift must be finite");
  if (!(tail_threshold > 0.0)) throw ContractViolation("tail_threshold must be positive");
}

// ---------------------------------------------------------------------------

DrivenHamiltonian::DrivenHamiltonian(const ComplexMatrix& static_part, RealVector drive_diagonal)
    : dim_(static_part.rows()), drive_(std::move(drive_diagonal)) {
  if (static_part.rows() != static_part.cols() || drive_.size() != dim_)
    throw DimensionError("DrivenHamiltonian: inconsistent dimensions");
  if (!is_hermitian(static_part))
    throw ContractViolation("DrivenHamiltonian: static part is not Hermitian");
  real_static_ = static_part.imag().cwiseAbs().maxCoeff() == 0.0;
  if (real_static_)
    static_real_ = static_part.real();
  else
    static_complex_ = static_part;
}

DrivenHamiltonian::DrivenHamiltonian(const ModelParams& p)
    : DrivenHamiltonian(build_static_hamiltonian(p), drive_operator_diagonal(p)) {}

void DrivenHamiltonian::apply(const StateVector& in, StateVector& out) const {
  if (in.size() != dim_) throw DimensionError("DrivenHamiltonian::apply: dimension mismatch");
  out.resize(dim_);
  if (real_static_) {
    // View the complex vector as a 2 x n real matrix (re; im). H0 is symmetric,
    // so (H0 v)^T = v^T H0 holds row by row.
    using RealMap = Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>>;
    using ConstRealMap = Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>>;
    ConstRealMap vin(reinterpret_cast<const double*>(in.data()), 2, dim_);
    RealMap vout(reinterpret_cast<double*>(out.data()), 2, dim_);
    vout.noalias() = vin * static_real_;
  } else {
    out.noalias() = static_complex_ * in;
  }
  if (field_ != 0.0) out += (field_ * drive_).cwiseProduct(in);
}

ComplexMatrix DrivenHamiltonian::dense() const {
  ComplexMatrix h = real_static_ ? static_real_.cast<Complex>().eval() : static_complex_;
  h.diagonal() += (field_ * drive_).cast<Complex>();
  return h;
}

// ---------------------------------------------------------------------------

LaguerreStepper::LaguerreStepper(const PropagatorConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

void LaguerreStepper::prepare(double dt, Eigen::Index dim) {
  if (prev_.size() != dim) {
    prev_.resize(dim);
    cur_.resize(dim);
    next_.resize(dim);
    hv_.resize(dim);
    acc_.resize(dim);
  }
  if (dt == prepared_dt_) return;
  const double tau = cfg_.scale * dt;
  const Complex one_plus(1.0, tau);
  ratio_ = Complex(0.0, tau) / one_plus;
  prefactor_ = std::pow(one_plus, -(cfg_.alpha + 1.0)) * std::exp(Complex(0.0, -cfg_.shift * dt));
  prepared_dt_ = dt;
}

template <class Apply>
StepReport LaguerreStepper::step_impl(Apply&& apply, StateVector& psi, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("Laguerre step size must be positive");
  prepare(dt, psi.size());
  const double alpha = cfg_.alpha;
  const double shift = cfg_.shift;
  const double inv_scale = 1.0 / cfg_.scale;

  // With H' = (H - shift) / scale the Laguerre recurrence
  //   L_0 = 1, L_1(x) = 1 + alpha - x,
  //   (k + 1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1}
  // becomes, for v_k = L_k(H') psi,
  //   (k + 1) v_{k+1} = (2k + 1 + alpha + shift/scale) v_k - H v_k / scale
  //                     - (k + alpha) v_{k-1}.
  const double s_over_c = shift * inv_scale;
  prev_ = psi;
  acc_ = psi;
  Complex zk = 1.0;
  apply(prev_, hv_);
  cur_ = (1.0 + alpha + s_over_c) * prev_ - inv_scale * hv_;
  zk *= ratio_;
  acc_ += zk * cur_;
  int issued = 1;
  for (int k = 1; k < cfg_.k_max; ++k) {
    apply(cur_, hv_);
    ++issued;
    const double kd = static_cast<double>(k);
    const double inv_next = 1.0 / (kd + 1.0);
    next_ = ((2.0 * kd + 1.0 + alpha + s_over_c) * inv_next) * cur_ - (inv_scale * inv_next) * hv_ -
            ((kd + alpha) * inv_next) * prev_;
    zk *= ratio_;
    acc_ += zk * next_;
    std::swap(prev_, cur_);
    std::swap(cur_, next_);
  }
  matvecs_ += issued;
  const double last_term = std::abs(zk) * cur_.norm();

  psi = prefactor_ * acc_;
  const double out_norm = psi.norm();
  StepReport report;
  report.tail_estimate = out_norm > 0.0 ? std::abs(prefactor_) * last_term / out_norm : 0.0;
  report.norm_drift = std::abs(out_norm - 1.0);
  if (report.tail_estimate > cfg_.tail_threshold)
    throw StepTooLargeError("Laguerre expansion tail " + std::to_string(report.tail_estimate) +
                                " exceeds threshold; reduce dt",
                            report.tail_estimate);
  return report;
}

StepReport LaguerreStepper::step(const DrivenHamiltonian& h, StateVector& psi, double dt) {
  return step_impl([&h](const StateVector& in, StateVector& out) { h.apply(in, out); }, psi, dt);
}

StepReport LaguerreStepper::step(const ComplexMatrix& h, StateVector& psi, double dt) {
  if (h.rows() != h.cols() || h.cols() != psi.size())
    throw DimensionError("laguerre step: Hamiltonian and state dimensions differ");
  return step_impl([&h](const StateVector& in, StateVector& out) { out.noalias() = h * in; }, psi,
                   dt);
}

std::pair<StateVector, StepReport> laguerre_step(const ComplexMatrix& h, const StateVector& psi,
                                                 const PropagatorConfig& cfg) {
  if (!is_hermitian(h)) throw ContractViolation("laguerre_step: Hamiltonian is not Hermitian");
  LaguerreStepper stepper(cfg);
  StateVector out = psi;
  const StepReport report = stepper.step(h, out, cfg.dt);
  return {std::move(out), report};
}

namespace {

ComplexMatrix exact_propagator(const ComplexMatrix& h, double dt) {
  const EigenSystem es = hermitian_eigendecompose(h);
  Eigen::VectorXcd phases(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k)
    phases[k] = std::exp(Complex(0.0, -es.values[k] * dt));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

template <class Apply>
void rk4_inplace(Apply&& apply, StateVector& psi, double dt, StateVector& k1, StateVector& k2,
                 StateVector& k3, StateVector& k4, StateVector& tmp) {
  // dpsi/dt = -i H psi
  const Complex mi(0.0, -1.0);
  apply(psi, k1);
  k1 *= mi;
  tmp = psi + (0.5 * dt) * k1;
  apply(tmp, k2);
  k2 *= mi;
  tmp = psi + (0.5 * dt) * k2;
  apply(tmp, k3);
  k3 *= mi;
  tmp = psi + dt * k3;
  apply(tmp, k4);
  k4 *= mi;
  psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

StateVector oracle_step(const ComplexMatrix& h, const StateVector& psi, double dt) {
  if (h.cols() != psi.size()) throw DimensionError("oracle_step: dimension mismatch");
  if (dt == 0.0) return psi;
  return exact_propagator(h, dt) * psi;
}

StateVector rk4_step(const ComplexMatrix& h, const StateVector& psi, double dt) {
  if (h.rows() != h.cols() || h.cols() != psi.size())
    throw DimensionError("rk4_step: dimension mismatch");
  StateVector out = psi, k1, k2, k3, k4, tmp;
  rk4_inplace([&h](const StateVector& in, StateVector& o) { o.noalias() = h * in; }, out, dt, k1,
              k2, k3, k4, tmp);
  return out;
}

// ---------------------------------------------------------------------------

PropagationStats propagate(const ModelParams& p, const DriveWaveform& w, StateVector& psi,
                           const PropagatorConfig& cfg, double t_end, Stepper stepper,
                           const StepObserver& observer, int rk4_substeps) {
  p.validate();
  w.validate();
  cfg.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ContractViolation("t_end must be positive");
  if (rk4_substeps < 1) throw ContractViolation("rk4_substeps must be at least 1");
  if (psi.size() != p.dim()) throw DimensionError("propagate: state dimension mismatch");

  const auto n_steps = static_cast<std::int64_t>(std::ceil(t_end / cfg.dt - 1e-9));
  const double h_step = t_end / static_cast<double>(n_steps);
  // Each step is a product of frozen-field exponentials (field, duration),
  // applied in order.
  struct Piece {
    double field;
    double duration;
  };
  std::array<Piece, 2> pieces{};
  auto plan_step = [&](double t0) -> std::span<const Piece> {
    switch (cfg.sampling) {
      case Sampling::Midpoint:
        pieces[0] = {drive_value(w, t0 + 0.5 * h_step), h_step};
        return {pieces.data(), 1};
      case Sampling::Left:
        pieces[0] = {drive_value(w, t0), h_step};
        return {pieces.data(), 1};
      case Sampling::Magnus4: {
        // Commutator-free fourth-order Magnus with Gauss-Legendre nodes. Since
        // H = H0 + F D, each factor is H0 + f_eff D over half a step.
        const double f1 = drive_value(w, t0 + kGaussLow * h_step);
        const double f2 = drive_value(w, t0 + kGaussHigh * h_step);
        pieces[0] = {2.0 * (kMagnusA * f1 + kMagnusB * f2), 0.5 * h_step};
        pieces[1] = {2.0 * (kMagnusB * f1 + kMagnusA * f2), 0.5 * h_step};
        return {pieces.data(), 2};
      }
    }
    return {};
  };

  DrivenHamiltonian ham(p);
  LaguerreStepper laguerre(cfg);
  PropagationStats stats;
  stats.step_size = h_step;

  // Oracle propagators keyed on the exact field value; periodic drives and
  // piecewise-constant ones revisit the same values.
  std::unordered_map<std::uint64_t, ComplexMatrix> oracle_cache;
  constexpr std::size_t kOracleCacheLimit = 4096;
  StateVector k1, k2, k3, k4, tmp;

  for (std::int64_t k = 0; k < n_steps; ++k) {
    for (const Piece& piece : plan_step(static_cast<double>(k) * h_step)) {
      const double f = piece.field;
      ham.set_field(f);

      switch (stepper) {
        case Stepper::Laguerre: {
          const StepReport r = laguerre.step(ham, psi, piece.duration);
          stats.max_tail = std::max(stats.max_tail, r.tail_estimate);
          break;
        }
        case Stepper::Oracle: {
          // Every piece in one run has the same duration, so the field is a sufficient key.
          const std::uint64_t key = std::bit_cast<std::uint64_t>(f);
          auto it = oracle_cache.find(key);
          if (it == oracle_cache.end()) {
            if (oracle_cache.size() >= kOracleCacheLimit) oracle_cache.clear();
            it = oracle_cache.emplace(key, exact_propagator(ham.dense(), piece.duration)).first;
          }
          psi = it->second * psi;
          break;
        }
        case Stepper::RungeKutta4: {
          const double sub = piece.duration / rk4_substeps;
          auto apply = [&ham, &stats](const StateVector& in, StateVector& out) {
            ham.apply(in, out);
            ++stats.matvecs;
          };
          for (int j = 0; j < rk4_substeps; ++j) rk4_inplace(apply, psi, sub, k1, k2, k3, k4, tmp);
          break;
        }
      }
    }

    const double t_now = static_cast<double>(k + 1) * h_step;
    if (!psi.allFinite())
      throw NumericFailure("state became non-finite at t = " + std::to_string(t_now), t_now);
    ++stats.steps;
    if (observer) observer(k + 1, t_now, psi);
  }
  if (stepper == Stepper::Laguerre) stats.matvecs = laguerre.matvecs();
  return stats;
}

EvolutionTrace evolve(const ModelParams& p, const DriveWaveform& w, const InitialState& s0,
                      const PropagatorConfig& cfg, double t_end, int sample_every,
                      Stepper stepper, const TraceOptions& options) {
  if (sample_every < 1) throw ContractViolation("sample_every must be at least 1");
  const SpaceLayout layout = p.layout();
  StateVector psi = build_initial_state(s0, p.n_fock);

  EvolutionTrace trace;
  std::ostringstream echo;
  echo.precision(17);
  echo << "epsilon = " << p.epsilon << "\ndelta = " << p.delta << "\nomega = " << p.omega
       << "\ng = " << p.g << "\nn_fock = " << p.n_fock << "\ndrive = " << to_string(w.kind)
       << "\namplitude = " << w.amplitude << "\nperiod = " << w.period
       << "\ninitial = " << s0.label.str() << "\nk_max = " << cfg.k_max
       << "\nalpha = " << cfg.alpha << "\ndt = " << cfg.dt << "\nshift = " << cfg.shift
       << "\nscale = " << cfg.scale << "\nsampling = " << to_string(cfg.sampling)
       << "\nstepper = " << to_string(stepper) << "\nt_end = " << t_end
       << "\nsample_every = " << sample_every << '\n';
  trace.params_echo = echo.str();

  const auto n_steps = static_cast<std::int64_t>(std::ceil(t_end / cfg.dt - 1e-9));
  trace.samples.reserve(static_cast<std::size_t>(n_steps / sample_every + 2));
  trace.samples.push_back(measure(psi, layout, 0.0, options.entropy_base));

  auto observer = [&](std::int64_t step, double t, const StateVector& state) {
    if (step % sample_every != 0) return;
    EntanglementSample s = measure(state, layout, t, options.entropy_base);
    if (!std::isfinite(s.concurrence) || !std::isfinite(s.entropy))
      throw NumericFailure("non-finite observable at t = " + std::to_string(t), t);
    trace.samples.push_back(s);
  };
  propagate(p, w, psi, cfg, t_end, stepper, observer);
  return trace;
}

// ---------------------------------------------------------------------------

PropagatorConfig calibrate_step(const ModelParams& p, const DriveWaveform& w,
                                const PropagatorConfig& cfg, const CalibrationCriteria& criteria) {
  p.validate();
  w.validate();
  cfg.validate();

  // The extreme eigenvalues of H0 + f D are convex/concave in f, so the
  // spectral range over f in [-A, A] is attained at the endpoints.
  const ComplexMatrix h0 = build_static_hamiltonian(p);
  const RealVector d = drive_operator_diagonal(p);
  std::vector<ComplexMatrix> extremes;
  // Magnus factors extrapolate the field slightly beyond the sampled values.
  const double a = w.peak() * (cfg.sampling == Sampling::Magnus4 ? 2.0 * kSqrt3 / 3.0 : 1.0);
  if (a == 0.0) {
    extremes.push_back(h0);
  } else {
    for (const double f : {a, -a}) {
      ComplexMatrix h = h0;
      h.diagonal() += (f * d).cast<Complex>();
      extremes.push_back(std::move(h));
    }
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& h : extremes) {
    const EigenSystem es = hermitian_eigendecompose(h);
    lo = std::min(lo, es.values.minCoeff());
    hi = std::max(hi, es.values.maxCoeff());
  }

  PropagatorConfig out = cfg;
  out.shift = 0.5 * (hi + lo);
  // A degenerate spectrum (H proportional to I) leaves nothing to expand;
  // a tiny scale keeps tau ~ 0 so the series collapses to its first term.
  out.scale = std::max(0.5 * (hi - lo), 1e-12 * std::max(1.0, std::abs(out.shift)));

  std::mt19937_64 rng(criteria.seed);
  std::normal_distribution<double> normal;
  std::vector<StateVector> trials;
  for (int k = 0; k < criteria.trial_states; ++k) {
    StateVector v(p.dim());
    for (auto& x : v) x = Complex(normal(rng), normal(rng));
    trials.push_back(v.normalized());
  }

  PropagatorConfig probe = out;
  probe.tail_threshold = std::numeric_limits<double>::infinity();
  while (true) {
    bool ok = true;
    for (const auto& h : extremes) {
      const ComplexMatrix exact = exact_propagator(h, probe.dt);
      LaguerreStepper stepper(probe);
      for (const auto& v : trials) {
        StateVector psi = v;
        const StepReport r = stepper.step(h, psi, probe.dt);
        const double err = (psi - exact * v).cwiseAbs().maxCoeff();
        if (!(r.tail_estimate < criteria.max_tail) || !(err < criteria.max_oracle_error)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) break;
    probe.dt *= 0.5;
    if (probe.dt < criteria.min_dt)
      throw CalibrationError("step calibration failed: dt fell below " +
                             std::to_string(criteria.min_dt));
  }
  out.dt = probe.dt;
  return out;
}

}  // namespace qdent
