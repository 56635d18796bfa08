#include "qdent/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qdent {

void ModelParams::validate() const {
  if (n_fock < 2) throw ContractViolation("n_fock must be at least 2");
  if (!std::isfinite(epsilon) || !std::isfinite(delta) || !std::isfinite(omega) ||
      !std::isfinite(g))
    throw ContractViolation("model parameters must be finite");
}

SpaceLayout ModelParams::layout() const {
  return SpaceLayout({2, 2, static_cast<std::size_t>(n_fock)});
}

std::string_view to_string(DriveKind kind) {
  switch (kind) {
    case DriveKind::None: return "none";
    case DriveKind::Cosine: return "cosine";
    case DriveKind::Rectangular: return "rectangular";
    case DriveKind::Triangular: return "triangular";
  }
  return "unknown";
}

DriveKind parse_drive_kind(std::string_view text) {
  if (text == "none") return DriveKind::None;
  if (text == "cosine" || text == "cos") return DriveKind::Cosine;
  if (text == "rectangular" || text == "rect" || text == "square") return DriveKind::Rectangular;
  if (text == "triangular" || text == "tri") return DriveKind::Triangular;
  throw ConfigError("unknown drive kind '" + std::string(text) + "'");
}

void DriveWaveform::validate() const {
  if (!(period > 0.0) || !std::isfinite(period))
    throw ContractViolation("drive period must be positive");
  if (!std::isfinite(amplitude)) throw ContractViolation("drive amplitude must be finite");
}

double DriveWaveform::peak() const { return kind == DriveKind::None ? 0.0 : std::abs(amplitude); }

double drive_value(const DriveWaveform& w, double t) {
  const double a = w.amplitude;
  const double p = w.period;
  switch (w.kind) {
    case DriveKind::None:
      return 0.0;
    case DriveKind::Cosine: {
      // Reduce to one period first so F(t + P) and F(t) share an argument.
      const double x = t / p - std::floor(t / p);
      return a * std::cos(2.0 * std::numbers::pi * x);
    }
    case DriveKind::Rectangular: {
      const double phase = t - p * std::floor(t / p);
      return phase < 0.5 * p ? a : -a;
    }
    case DriveKind::Triangular: {
      // Fractional part of t/P in [0, 1).
      double x = t / p - std::floor(t / p);
      if (x >= 1.0) x = 0.0;
      return x < 0.5 ? a * (1.0 - 4.0 * x) : a * (4.0 * x - 3.0);
    }
  }
  return 0.0;
}

QubitLabel QubitLabel::parse(std::string_view text) {
  if (text.size() != 2 || (text[0] != '0' && text[0] != '1') ||
      (text[1] != '0' && text[1] != '1'))
    throw ConfigError("qubit label must be one of 00, 01, 10, 11 (got '" + std::string(text) +
                      "')");
  return {text[0] - '0', text[1] - '0'};
}

std::string QubitLabel::str() const {
  return {static_cast<char>('0' + q1_), static_cast<char>('0' + q2_)};
}

ComplexMatrix embed_qubit1(const ComplexMatrix& op, int n_fock) {
  return kron(kron(op, pauli::identity(2)), pauli::identity(n_fock));
}

ComplexMatrix embed_qubit2(const ComplexMatrix& op, int n_fock) {
  return kron(kron(pauli::identity(2), op), pauli::identity(n_fock));
}

ComplexMatrix embed_boson(const ComplexMatrix& op) {
  return kron(pauli::identity(4), op);
}

ComplexMatrix build_static_hamiltonian(const ModelParams& p) {
  p.validate();
  const int n = p.n_fock;
  const ComplexMatrix sx1 = embed_qubit1(pauli::x(), n);
  const ComplexMatrix sx2 = embed_qubit2(pauli::x(), n);
  const ComplexMatrix sz1 = embed_qubit1(pauli::z(), n);
  const ComplexMatrix sz2 = embed_qubit2(pauli::z(), n);
  const ComplexMatrix a = annihilation(n);
  const ComplexMatrix num = embed_boson(a.adjoint() * a);
  const ComplexMatrix quad = embed_boson(a + a.adjoint());
  const ComplexMatrix id = ComplexMatrix::Identity(p.dim(), p.dim());

  ComplexMatrix h = -0.5 * p.delta * (sx1 + sx2) + 0.5 * p.epsilon * (sz1 + sz2) +
                    p.omega * (num + 0.5 * id) + p.g * quad * (sx1 + sx2);
  return h;
}

ComplexMatrix build_drive_operator(const ModelParams& p) {
  p.validate();
  return embed_qubit1(pauli::z(), p.n_fock) + embed_qubit2(pauli::z(), p.n_fock);
}

RealVector drive_operator_diagonal(const ModelParams& p) {
  return build_drive_operator(p).diagonal().real();
}

ComplexMatrix build_total_hamiltonian(const ModelParams& p, const DriveWaveform& w, double t) {
  ComplexMatrix h = build_static_hamiltonian(p);
  const double f = drive_value(w, t);
  if (f != 0.0) h.diagonal() += f * drive_operator_diagonal(p).cast<Complex>();
  return h;
}

ComplexMatrix build_number_operator(const ModelParams& p) {
  p.validate();
  const ComplexMatrix a = annihilation(p.n_fock);
  return embed_boson(a.adjoint() * a);
}

StateVector build_initial_state(const InitialState& s, int n_fock) {
  if (n_fock < 2) throw ContractViolation("n_fock must be at least 2");
  const SpaceLayout layout({2, 2, static_cast<std::size_t>(n_fock)});
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  const auto flat = layout.flatten({static_cast<std::size_t>(s.label.first()),
                                    static_cast<std::size_t>(s.label.second()), 0});
  psi[static_cast<Eigen::Index>(flat)] = 1.0;
  return psi;
}

}  // namespace qdent
