#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <utility>

#include "qdent/analysis.hpp"
#include "qdent/model.hpp"

namespace qdent {

/// How the time-dependent field is frozen within a step: at the midpoint
/// (second order), at the left end (first order), or as two half-step
/// exponentials of a commutator-free fourth-order Magnus scheme.
enum class Sampling { Midpoint, Left, Magnus4 };
enum class Stepper { Laguerre, Oracle, RungeKutta4 };

std::string_view to_string(Sampling s);
std::string_view to_string(Stepper s);
Sampling parse_sampling(std::string_view text);
Stepper parse_stepper(std::string_view text);

/// Settings for the Laguerre-polynomial expansion of exp(-i H dt).
///
/// The Hamiltonian is mapped to H' = (H - shift) / scale before expansion and
/// the phase exp(-i shift dt) is restored afterwards, so the expansion
/// argument is tau = scale * dt.
struct PropagatorConfig {
  int k_max = 20;
  double alpha = 0.0;
  double dt = 1.0;
  double shift = 0.0;
  double scale = 1.0;
  Sampling sampling = Sampling::Midpoint;
  /// Steps whose relative last-term magnitude exceeds this are rejected.
  double tail_threshold = 1e-8;

  void validate() const;
};

struct StepReport {
  double tail_estimate = 0.0;
  double norm_drift = 0.0;
};

/// H(f) = H0 + f * D with D diagonal. Applies H(f) to vectors without
/// materializing it; a real symmetric H0 takes a real-arithmetic fast path.
class DrivenHamiltonian {
 public:
  DrivenHamiltonian(const ComplexMatrix& static_part, RealVector drive_diagonal);
  DrivenHamiltonian(const ModelParams& p);

  void set_field(double f) { field_ = f; }
  double field() const { return field_; }
  Eigen::Index dim() const { return dim_; }

  /// out = H(f) * in. `out` must not alias `in`.
  void apply(const StateVector& in, StateVector& out) const;
  ComplexMatrix dense() const;

 private:
  Eigen::Index dim_;
  bool real_static_;
  RealMatrix static_real_;
  ComplexMatrix static_complex_;
  RealVector drive_;
  double field_ = 0.0;
};

/// Reusable Laguerre stepper holding its workspace. Not thread-safe; use one
/// instance per evolution.
class LaguerreStepper {
 public:
  explicit LaguerreStepper(const PropagatorConfig& cfg);

  /// Advances psi in place by dt under h.
  StepReport step(const DrivenHamiltonian& h, StateVector& psi, double dt);
  StepReport step(const ComplexMatrix& h, StateVector& psi, double dt);

  std::int64_t matvecs() const { return matvecs_; }
  const PropagatorConfig& config() const { return cfg_; }

 private:
  template <class Apply>
  StepReport step_impl(Apply&& apply, StateVector& psi, double dt);
  void prepare(double dt, Eigen::Index dim);

  PropagatorConfig cfg_;
  double prepared_dt_ = -1.0;
  Complex prefactor_{1.0, 0.0};  // (1 + i tau)^-(alpha + 1) * exp(-i shift dt)
  Complex ratio_{0.0, 0.0};      // i tau / (1 + i tau)
  StateVector prev_, cur_, next_, hv_, acc_;
  std::int64_t matvecs_ = 0;
};

std::pair<StateVector, StepReport> laguerre_step(const ComplexMatrix& h, const StateVector& psi,
                                                 const PropagatorConfig& cfg);

/// Exact reference: V exp(-i Lambda dt) V^+ psi.
StateVector oracle_step(const ComplexMatrix& h, const StateVector& psi, double dt);

/// Classical explicit fourth-order Runge-Kutta step of i dpsi/dt = H psi.
StateVector rk4_step(const ComplexMatrix& h, const StateVector& psi, double dt);

struct PropagationStats {
  std::int64_t steps = 0;
  std::int64_t matvecs = 0;
  double max_tail = 0.0;
  double step_size = 0.0;
};

/// Called after every accepted step with (step index starting at 1, time, state).
using StepObserver = std::function<void(std::int64_t, double, const StateVector&)>;

/// Advances psi from t = 0 to t_end with a piecewise-constant Hamiltonian
/// sampled per cfg.sampling. The step is t_end / ceil(t_end / cfg.dt), never
/// larger than cfg.dt. For RungeKutta4 each step is split into rk4_substeps
/// sub-steps under the same frozen Hamiltonian.
PropagationStats propagate(const ModelParams& p, const DriveWaveform& w, StateVector& psi,
                           const PropagatorConfig& cfg, double t_end, Stepper stepper,
                           const StepObserver& observer = {}, int rk4_substeps = 1);

struct TraceOptions {
  double entropy_base = 2.0;
};

/// Runs propagate() from the given initial state and records a sample at
/// t = 0 and after every sample_every steps.
EvolutionTrace evolve(const ModelParams& p, const DriveWaveform& w, const InitialState& s0,
                      const PropagatorConfig& cfg, double t_end, int sample_every,
                      Stepper stepper, const TraceOptions& options = {});

/// Sets shift/scale from the spectral range of the strongest-field
/// Hamiltonians, then halves dt until the expansion tail and the one-step
/// oracle error are small on random states.
struct CalibrationCriteria {
  double max_tail = 1e-10;
  double max_oracle_error = 1e-9;
  int trial_states = 10;
  double min_dt = 1e-6;
  std::uint64_t seed = 20240601;
};

PropagatorConfig calibrate_step(const ModelParams& p, const DriveWaveform& w,
                                const PropagatorConfig& cfg,
                                const CalibrationCriteria& criteria = {});

}  // namespace qdent
