#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdent/config.hpp"

namespace qdent::app {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kNumericFailure = 3,
};

struct RunResult {
  EvolutionTrace trace;
  std::optional<PeakReport> peak;
  PropagatorConfig propagator;  // as used, after calibration
};

/// Calibrates (if requested), evolves and analyses; performs no file I/O.
RunResult execute(const RunConfig& cfg);

/// `run <config>`: writes the CSV, prints the PeakReport to `out`.
int run_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The invariant suite behind `verify`. The quick subset skips the long
/// accumulation checks and uses smaller random samples.
std::vector<CheckResult> run_verification(bool quick);

int verify_command(bool quick, std::ostream& out, std::ostream& err);

struct BenchmarkResult {
  double t_end = 0.0;
  double target_error = 0.0;
  double dt = 0.0;
  std::int64_t steps = 0;

  double laguerre_seconds = 0.0;
  std::int64_t laguerre_matvecs = 0;
  double laguerre_error = 0.0;

  bool rk4_reached_target = false;
  int rk4_substeps = 0;
  std::int64_t rk4_steps = 0;
  double rk4_seconds = 0.0;
  std::int64_t rk4_matvecs = 0;
  double rk4_error = 0.0;

  /// rk4_seconds / laguerre_seconds (0 when the target was not reached).
  double speed_ratio = 0.0;
};

inline constexpr double kReportedSpeedup = 8.0;

/// Times Laguerre and RK4 on the same piecewise-constant evolution and
/// compares both end states against the exact per-step exponential.
BenchmarkResult run_benchmark(const RunConfig& cfg, double t_end = 100.0,
                              double target_error = 1e-7, int max_rk4_substeps = 4096);
std::string format_benchmark(const BenchmarkResult& r);

int benchmark_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err,
                      double t_end = 100.0);

/// Runs every *.cfg in `dir`, each writing its own output; returns the worst
/// exit code.
int sweep_command(const std::filesystem::path& dir, unsigned jobs, std::ostream& out,
                  std::ostream& err);

}  // namespace qdent::app
