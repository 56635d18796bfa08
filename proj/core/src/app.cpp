#include "qdent/app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace qdent::app {

namespace {

PropagatorConfig resolve_propagator(const RunConfig& cfg) {
  if (!cfg.auto_dt) return cfg.propagator;
  CalibrationCriteria criteria;
  criteria.seed = cfg.seed;
  return calibrate_step(cfg.model, cfg.drive, cfg.propagator, criteria);
}

}  // namespace

RunResult execute(const RunConfig& cfg) {
  cfg.validate();
  RunResult result;
  result.propagator = resolve_propagator(cfg);
  result.trace = evolve(cfg.model, cfg.drive, cfg.initial, result.propagator, cfg.t_end,
                        cfg.sample_every, cfg.stepper, TraceOptions{cfg.entropy_base});
  result.peak = first_envelope_peak(result.trace, cfg.threshold, cfg.effective_bridge_gap());
  return result;
}

int run_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_run_config(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  RunResult result;
  try {
    result = execute(cfg);
  } catch (const NumericFailure& e) {
    err << "numeric failure at t = " << e.t << ": " << e.what() << '\n';
    return kNumericFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }

  const auto path = resolve_output_path(cfg);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream csv(path);
  if (!csv) {
    err << "cannot write '" << path.string() << "'\n";
    return kConfigError;
  }
  write_trace_csv(csv, result.trace);
  csv.close();

  err << "wrote " << result.trace.size() << " samples to " << path.string() << " (dt = "
      << result.propagator.dt << ")\n";
  out << "config: " << config.string() << '\n'
      << "output: " << path.string() << '\n'
      << "dt: " << result.propagator.dt << '\n'
      << format_peak_report(result.peak, cfg.threshold);
  return kOk;
}

int verify_command(bool quick, std::ostream& out, std::ostream& err) {
  const auto results = run_verification(quick);
  int failures = 0;
  for (const auto& r : results) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) out << " -- " << r.detail;
    out << '\n';
    if (!r.passed) ++failures;
  }
  out << results.size() - failures << "/" << results.size() << " checks passed\n";
  if (failures > 0) {
    err << "verify: " << failures << " check(s) failed:";
    for (const auto& r : results)
      if (!r.passed) err << ' ' << r.name;
    err << '\n';
    return kCheckFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

// Mean wall time of `fn`, repeated until at least `budget` seconds elapsed.
template <class Fn>
double timed(Fn&& fn, double budget = 0.25) {
  int reps = 0;
  const auto start = Clock::now();
  double elapsed = 0.0;
  do {
    fn();
    ++reps;
    elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  } while (elapsed < budget);
  return elapsed / reps;
}

}  // namespace

BenchmarkResult run_benchmark(const RunConfig& cfg, double t_end, double target_error,
                              int max_rk4_substeps) {
  cfg.validate();
  const PropagatorConfig prop = resolve_propagator(cfg);
  const StateVector psi0 = build_initial_state(cfg.initial, cfg.model.n_fock);

  BenchmarkResult r;
  r.t_end = t_end;
  r.target_error = target_error;

  StateVector reference = psi0;
  const PropagationStats ref_stats =
      propagate(cfg.model, cfg.drive, reference, prop, t_end, Stepper::Oracle);
  r.dt = ref_stats.step_size;
  r.steps = ref_stats.steps;

  StateVector lag = psi0;
  PropagationStats lag_stats;
  r.laguerre_seconds = timed([&] {
    lag = psi0;
    lag_stats = propagate(cfg.model, cfg.drive, lag, prop, t_end, Stepper::Laguerre);
  });
  r.laguerre_matvecs = lag_stats.matvecs;
  r.laguerre_error = (lag - reference).norm();

  for (int sub = 1; sub <= max_rk4_substeps; sub *= 2) {
    StateVector rk = psi0;
    const PropagationStats st =
        propagate(cfg.model, cfg.drive, rk, prop, t_end, Stepper::RungeKutta4, {}, sub);
    const double err = (rk - reference).norm();
    if (std::isfinite(err) && err <= target_error) {
      r.rk4_reached_target = true;
      r.rk4_substeps = sub;
      r.rk4_steps = st.steps * sub;
      r.rk4_matvecs = st.matvecs;
      r.rk4_error = err;
      r.rk4_seconds = timed([&] {
        StateVector v = psi0;
        propagate(cfg.model, cfg.drive, v, prop, t_end, Stepper::RungeKutta4, {}, sub);
      });
      break;
    }
    r.rk4_substeps = sub;
    r.rk4_error = err;
  }
  if (r.rk4_reached_target && r.laguerre_seconds > 0.0)
    r.speed_ratio = r.rk4_seconds / r.laguerre_seconds;
  return r;
}

std::string format_benchmark(const BenchmarkResult& r) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "benchmark: t_end = " << r.t_end << ", target end-state error = " << r.target_error
      << " (2-norm vs exact per-step exponential)\n";
  out << std::left << std::setw(10) << "method" << std::setw(14) << "wall_s" << std::setw(12)
      << "steps" << std::setw(12) << "matvecs" << "end_error\n";
  out << std::setw(10) << "laguerre" << std::setw(14) << r.laguerre_seconds << std::setw(12)
      << r.steps << std::setw(12) << r.laguerre_matvecs << r.laguerre_error << '\n';
  if (r.rk4_reached_target) {
    out << std::setw(10) << "rk4" << std::setw(14) << r.rk4_seconds << std::setw(12)
        << r.rk4_steps << std::setw(12) << r.rk4_matvecs << r.rk4_error << '\n';
    out << "speed_ratio (rk4 / laguerre): " << r.speed_ratio << '\n';
  } else {
    out << "rk4: target accuracy not reached with " << r.rk4_substeps
        << " sub-steps per step (error " << r.rk4_error << ")\n";
    out << "speed_ratio: unavailable\n";
  }
  out << "reported_speedup_for_comparison: " << kReportedSpeedup << '\n';
  return out.str();
}

int benchmark_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err,
                      double t_end) {
  RunConfig cfg;
  try {
    cfg = load_run_config(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    out << format_benchmark(run_benchmark(cfg, t_end));
  } catch (const NumericFailure& e) {
    err << "numeric failure at t = " << e.t << ": " << e.what() << '\n';
    return kNumericFailure;
  } catch (const Error& e) {
    err << "benchmark failed: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kOk;
}

int sweep_command(const std::filesystem::path& dir, unsigned jobs, std::ostream& out,
                  std::ostream& err) {
  if (!std::filesystem::is_directory(dir)) {
    err << "sweep: '" << dir.string() << "' is not a directory\n";
    return kConfigError;
  }
  std::vector<std::filesystem::path> configs;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfg")
      configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    err << "sweep: no *.cfg files in '" << dir.string() << "'\n";
    return kConfigError;
  }

  std::vector<int> codes(configs.size(), kOk);
  std::vector<std::string> reports(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      std::ostringstream o, e;
      codes[i] = run_command(configs[i], o, e);
      reports[i] = o.str();
      std::lock_guard lock(err_mutex);
      err << e.str();
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(configs.size()));
  std::vector<std::jthread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  pool.clear();

  int worst = kOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    out << reports[i] << '\n';
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

}  // namespace qdent::app
