#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "qdent/propagator.hpp"

namespace qdent {

/// Everything needed for one evolution run.
///
/// Text format: one `key = value` per line; `#` starts a comment; blank lines
/// are ignored; keys are case-sensitive and may appear at most once.
///
///   epsilon, delta, omega, g        real model parameters
///   n_fock                          integer >= 2
///   drive                           none | cosine | rectangular | triangular
///   amplitude, period               drive A and P
///   initial                         00 | 01 | 10 | 11
///   stepper                         laguerre | oracle
///   dt                              real or `auto` (calibrate_step)
///   k_max, alpha, shift, scale      expansion settings (shift/scale ignored when dt = auto)
///   sampling                        midpoint | left | magnus4
///   tail_threshold                  per-step rejection threshold
///   t_end, sample_every             horizon and sampling stride in steps
///   threshold, bridge_gap           PeakReport threshold and dip bridging (default: period)
///   entropy_base                    logarithm base for S (default 2)
///   output                          CSV path (relative paths resolve against the cwd)
///   seed                            seed for calibration trial states
struct RunConfig {
  ModelParams model;
  DriveWaveform drive;
  InitialState initial;
  PropagatorConfig propagator;
  bool auto_dt = true;
  Stepper stepper = Stepper::Laguerre;
  double t_end = 25000.0;
  int sample_every = 1;
  double threshold = 0.5;
  std::optional<double> bridge_gap;
  double entropy_base = 2.0;
  std::string output = "trace.csv";
  std::uint64_t seed = 20240601;

  void validate() const;
  double effective_bridge_gap() const { return bridge_gap.value_or(drive.period); }
};

RunConfig parse_run_config(std::istream& in, const std::string& origin = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);
std::string format_run_config(const RunConfig& cfg);

/// Environment variable that, when set, redirects outputs into a directory
/// (the configured file name is kept).
inline constexpr const char* kOutputDirEnv = "QDENT_OUTPUT_DIR";

std::filesystem::path resolve_output_path(const RunConfig& cfg);

inline constexpr const char* kCsvHeader = "t,concurrence,entropy,norm,mean_photon,p00,p01,p10,p11,s_q1,s_q2";

/// One row per sample, 12 significant digits.
void write_trace_csv(std::ostream& out, const EvolutionTrace& trace);
EvolutionTrace read_trace_csv(std::istream& in);

}  // namespace qdent
