#include "qdent/config.hpp"

#include <array>
#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

namespace qdent {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view text, const std::string& where) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError(where + ": expected a real number, got '" + s + "'");
  return v;
}

std::int64_t to_int(std::string_view text, const std::string& where) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(where + ": expected an integer, got '" + std::string(text) + "'");
  return v;
}

}  // namespace

void RunConfig::validate() const {
  try {
    model.validate();
    drive.validate();
    if (!auto_dt) propagator.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  if (stepper == Stepper::RungeKutta4)
    throw ConfigError("stepper rk4 is only available through the benchmark command");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (sample_every < 1) throw ConfigError("sample_every must be at least 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  if (bridge_gap && *bridge_gap < 0.0) throw ConfigError("bridge_gap must be non-negative");
  if (!(entropy_base > 1.0)) throw ConfigError("entropy_base must exceed 1");
  if (output.empty()) throw ConfigError("output path is empty");
}

RunConfig parse_run_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    const std::string where = origin + ":" + std::to_string(line_no);
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(trim(view.substr(0, eq)));
    const std::string_view value = trim(view.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (seen.count(key))
      throw ConfigError(where + ": duplicate key '" + key + "' (first on line " +
                        std::to_string(seen[key]) + ")");
    seen[key] = line_no;

    try {
      if (key == "epsilon") cfg.model.epsilon = to_double(value, where);
      else if (key == "delta") cfg.model.delta = to_double(value, where);
      else if (key == "omega") cfg.model.omega = to_double(value, where);
      else if (key == "g") cfg.model.g = to_double(value, where);
      else if (key == "n_fock") cfg.model.n_fock = static_cast<int>(to_int(value, where));
      else if (key == "drive") cfg.drive.kind = parse_drive_kind(value);
      else if (key == "amplitude") cfg.drive.amplitude = to_double(value, where);
      else if (key == "period") cfg.drive.period = to_double(value, where);
      else if (key == "initial") cfg.initial.label = QubitLabel::parse(value);
      else if (key == "stepper") cfg.stepper = parse_stepper(value);
      else if (key == "dt") {
        if (value == "auto") {
          cfg.auto_dt = true;
        } else {
          cfg.auto_dt = false;
          cfg.propagator.dt = to_double(value, where);
        }
      }
      else if (key == "k_max") cfg.propagator.k_max = static_cast<int>(to_int(value, where));
      else if (key == "alpha") cfg.propagator.alpha = to_double(value, where);
      else if (key == "shift") cfg.propagator.shift = to_double(value, where);
      else if (key == "scale") cfg.propagator.scale = to_double(value, where);
      else if (key == "sampling") cfg.propagator.sampling = parse_sampling(value);
      else if (key == "tail_threshold") cfg.propagator.tail_threshold = to_double(value, where);
      else if (key == "t_end") cfg.t_end = to_double(value, where);
      else if (key == "sample_every") cfg.sample_every = static_cast<int>(to_int(value, where));
      else if (key == "threshold") cfg.threshold = to_double(value, where);
      else if (key == "bridge_gap") cfg.bridge_gap = to_double(value, where);
      else if (key == "entropy_base") cfg.entropy_base = to_double(value, where);
      else if (key == "output") cfg.output = std::string(value);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(value, where));
      else throw ConfigError(where + ": unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.rfind(origin, 0) == 0) throw;
      throw ConfigError(where + ": " + msg);
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_run_config(in, path.string());
}

std::string format_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "epsilon = " << cfg.model.epsilon << '\n'
      << "delta = " << cfg.model.delta << '\n'
      << "omega = " << cfg.model.omega << '\n'
      << "g = " << cfg.model.g << '\n'
      << "n_fock = " << cfg.model.n_fock << '\n'
      << "drive = " << to_string(cfg.drive.kind) << '\n'
      << "amplitude = " << cfg.drive.amplitude << '\n'
      << "period = " << cfg.drive.period << '\n'
      << "initial = " << cfg.initial.label.str() << '\n'
      << "stepper = " << to_string(cfg.stepper) << '\n';
  if (cfg.auto_dt) {
    out << "dt = auto\n";
  } else {
    out << "dt = " << cfg.propagator.dt << '\n'
        << "shift = " << cfg.propagator.shift << '\n'
        << "scale = " << cfg.propagator.scale << '\n';
  }
  out << "k_max = " << cfg.propagator.k_max << '\n'
      << "alpha = " << cfg.propagator.alpha << '\n'
      << "sampling = " << to_string(cfg.propagator.sampling) << '\n'
      << "tail_threshold = " << cfg.propagator.tail_threshold << '\n'
      << "t_end = " << cfg.t_end << '\n'
      << "sample_every = " << cfg.sample_every << '\n'
      << "threshold = " << cfg.threshold << '\n';
  if (cfg.bridge_gap) out << "bridge_gap = " << *cfg.bridge_gap << '\n';
  out << "entropy_base = " << cfg.entropy_base << '\n'
      << "output = " << cfg.output << '\n'
      << "seed = " << cfg.seed << '\n';
  return out.str();
}

std::filesystem::path resolve_output_path(const RunConfig& cfg) {
  std::filesystem::path p(cfg.output);
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0')
    return std::filesystem::path(dir) / p.filename();
  return p;
}

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
  out << kCsvHeader << '\n';
  char buf[64];
  auto field = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out << buf;
  };
  for (const auto& s : trace.samples) {
    field(s.t);
    for (const double v : {s.concurrence, s.entropy, s.norm, s.mean_photon, s.populations[0],
                           s.populations[1], s.populations[2], s.populations[3], s.entropy_q1,
                           s.entropy_q2}) {
      out << ',';
      field(v);
    }
    out << '\n';
  }
}

EvolutionTrace read_trace_csv(std::istream& in) {
  EvolutionTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV is empty");
  if (trim(line) != kCsvHeader) throw ConfigError("unexpected CSV header '" + line + "'");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::array<double, 11> v{};
    std::size_t col = 0;
    std::string_view rest(line);
    const std::string where = "CSV row " + std::to_string(row);
    while (true) {
      const auto comma = rest.find(',');
      if (col >= v.size()) throw ConfigError(where + ": too many columns");
      v[col++] = to_double(trim(rest.substr(0, comma)), where);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (col != v.size()) throw ConfigError(where + ": expected 11 columns");
    EntanglementSample s;
    s.t = v[0];
    s.concurrence = v[1];
    s.entropy = v[2];
    s.norm = v[3];
    s.mean_photon = v[4];
    s.populations = {v[5], v[6], v[7], v[8]};
    s.entropy_q1 = v[9];
    s.entropy_q2 = v[10];
    trace.samples.push_back(s);
  }
  return trace;
}

}  // namespace qdent
