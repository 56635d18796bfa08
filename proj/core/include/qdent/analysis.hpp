#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdent/observables.hpp"

namespace qdent {

struct EvolutionTrace {
  std::vector<EntanglementSample> samples;
  /// Configuration snapshot as "key = value" lines.
  std::string params_echo;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

/// Strictly increasing times with uniform spacing (relative tolerance 1e-9).
bool has_uniform_grid(const EvolutionTrace& trace);

struct PeakReport {
  double t_peak = 0.0;
  double c_peak = 0.0;
  double interval_start = 0.0;
  double interval_end = 0.0;
  double interval_length = 0.0;
  double threshold = 0.5;
};

/// First contiguous region with C >= threshold. Sub-threshold dips shorter
/// than bridge_gap (measured between interpolated crossings) are absorbed
/// into the region. Crossings are located by linear interpolation; a region
/// touching either end of the trace is clipped there. Returns nullopt when C
/// never reaches the threshold.
std::optional<PeakReport> first_envelope_peak(const EvolutionTrace& trace, double threshold,
                                              double bridge_gap = 0.0);

/// max_k |C_a(t_k) - C_b(t_k)|; the two traces must share a sample grid.
double trace_compare(const EvolutionTrace& a, const EvolutionTrace& b);

std::string format_peak_report(const std::optional<PeakReport>& report, double threshold);

}  // namespace qdent
