#pragma once

#include <array>
#include <string>
#include <string_view>

#include "qdent/tensor.hpp"

namespace qdent {

// Two identical two-level excitons coupled through one cavity mode:
//
//   H(t) = sum_i ( -delta/2 sx_i + epsilon/2 sz_i ) + omega (a^+ a + 1/2)
//          + g (a + a^+) sum_i sx_i + F(t) sum_i sz_i
//
// Basis ordering is [qubit1, qubit2, boson]. |0> is the +1 eigenvector of sz.

struct ModelParams {
  double epsilon = 0.4;
  double delta = 0.4;
  double omega = 0.02;
  double g = 0.02;
  int n_fock = 12;

  void validate() const;
  SpaceLayout layout() const;
  Eigen::Index dim() const { return 4 * static_cast<Eigen::Index>(n_fock); }
};

enum class DriveKind { None, Cosine, Rectangular, Triangular };

std::string_view to_string(DriveKind kind);
DriveKind parse_drive_kind(std::string_view text);

/// Periodic field F(t). All periodic kinds start at F(0) = +A. The
/// rectangular wave is +A on the first half period, the triangular wave is
/// piecewise linear with its minimum -A at P/2.
struct DriveWaveform {
  DriveKind kind = DriveKind::Cosine;
  double amplitude = 0.48;
  double period = 4.0;

  void validate() const;
  /// Largest |F(t)| over a period (0 when kind is None).
  double peak() const;
};

double drive_value(const DriveWaveform& w, double t);

/// Qubit label |q1 q2>. The index is q1*2 + q2, matching SpaceLayout order.
class QubitLabel {
 public:
  constexpr QubitLabel(int q1, int q2) : q1_(q1), q2_(q2) {}
  static QubitLabel parse(std::string_view text);

  int first() const { return q1_; }
  int second() const { return q2_; }
  int index() const { return 2 * q1_ + q2_; }
  std::string str() const;

  bool operator==(const QubitLabel&) const = default;

 private:
  int q1_;
  int q2_;
};

/// Product initial state |q1 q2> (x) |n = 0>.
struct InitialState {
  QubitLabel label{0, 1};
};

ComplexMatrix build_static_hamiltonian(const ModelParams& p);

/// sz_1 + sz_2 embedded in the composite space. It is diagonal in this basis.
ComplexMatrix build_drive_operator(const ModelParams& p);
RealVector drive_operator_diagonal(const ModelParams& p);

ComplexMatrix build_total_hamiltonian(const ModelParams& p, const DriveWaveform& w, double t);

/// a^+ a embedded in the composite space.
ComplexMatrix build_number_operator(const ModelParams& p);

StateVector build_initial_state(const InitialState& s, int n_fock);

/// Lifts single-factor operators to the full space, identity elsewhere.
ComplexMatrix embed_qubit1(const ComplexMatrix& op, int n_fock);
ComplexMatrix embed_qubit2(const ComplexMatrix& op, int n_fock);
ComplexMatrix embed_boson(const ComplexMatrix& op);

}  // namespace qdent
