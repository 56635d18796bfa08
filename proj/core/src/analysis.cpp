#include "qdent/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdent {

bool has_uniform_grid(const EvolutionTrace& trace) {
  const auto& s = trace.samples;
  if (s.size() < 2) return true;
  const double h = s[1].t - s[0].t;
  if (!(h > 0.0)) return false;
  const double tol = 1e-9 * std::max(1.0, std::abs(s.back().t));
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double step = s[k].t - s[k - 1].t;
    if (!(step > 0.0) || std::abs(step - h) > tol) return false;
  }
  return true;
}

namespace {

struct Region {
  std::size_t first;  // first sample index with C >= threshold
  std::size_t last;   // last sample index with C >= threshold
  double start;
  double end;
};

double crossing(const EntanglementSample& lo, const EntanglementSample& hi, double threshold) {
  const double dc = hi.concurrence - lo.concurrence;
  if (dc == 0.0) return lo.t;
  const double frac = (threshold - lo.concurrence) / dc;
  return lo.t + std::clamp(frac, 0.0, 1.0) * (hi.t - lo.t);
}

}  // namespace

std::optional<PeakReport> first_envelope_peak(const EvolutionTrace& trace, double threshold,
                                              double bridge_gap) {
  if (trace.empty()) throw ContractViolation("first_envelope_peak: empty trace");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ContractViolation("first_envelope_peak: threshold must lie in (0, 1)");

  const auto& s = trace.samples;
  const std::size_t n = s.size();
  auto above = [&](std::size_t k) { return s[k].concurrence >= threshold; };

  auto next_region = [&](std::size_t from) -> std::optional<Region> {
    std::size_t i = from;
    while (i < n && !above(i)) ++i;
    if (i == n) return std::nullopt;
    std::size_t j = i;
    while (j + 1 < n && above(j + 1)) ++j;
    Region r{i, j, s[i].t, s[j].t};
    if (i > 0) r.start = crossing(s[i - 1], s[i], threshold);
    if (j + 1 < n) r.end = crossing(s[j], s[j + 1], threshold);
    return r;
  };

  auto region = next_region(0);
  if (!region) return std::nullopt;
  while (region->last + 1 < n) {
    auto following = next_region(region->last + 1);
    if (!following || following->start - region->end >= bridge_gap) break;
    region->last = following->last;
    region->end = following->end;
  }

  PeakReport report;
  report.threshold = threshold;
  std::size_t best = region->first;
  for (std::size_t k = region->first; k <= region->last; ++k)
    if (s[k].concurrence > s[best].concurrence) best = k;
  report.t_peak = s[best].t;
  report.c_peak = s[best].concurrence;
  report.interval_start = region->start;
  report.interval_end = region->end;
  report.interval_length = region->end - region->start;
  return report;
}

double trace_compare(const EvolutionTrace& a, const EvolutionTrace& b) {
  if (a.size() != b.size())
    throw DimensionError("trace_compare: traces have different sample counts");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double tol = 1e-9 * std::max(1.0, std::abs(a.samples[k].t));
    if (std::abs(a.samples[k].t - b.samples[k].t) > tol)
      throw DimensionError("trace_compare: sample grids differ");
    worst = std::max(worst, std::abs(a.samples[k].concurrence - b.samples[k].concurrence));
  }
  return worst;
}

std::string format_peak_report(const std::optional<PeakReport>& report, double threshold) {
  std::ostringstream out;
  out.precision(12);
  out << "peak_found: " << (report ? "true" : "false") << '\n';
  out << "threshold: " << threshold << '\n';
  if (report) {
    out << "t_peak: " << report->t_peak << '\n'
        << "c_peak: " << report->c_peak << '\n'
        << "interval_start: " << report->interval_start << '\n'
        << "interval_end: " << report->interval_end << '\n'
        << "interval_length: " << report->interval_length << '\n';
  }
  return out.str();
}

}  // namespace qdent
