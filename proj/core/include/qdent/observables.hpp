#pragma once

#include <array>

#include "qdent/tensor.hpp"

namespace qdent {

/// Two-qubit density matrix over {|00>, |01>, |10>, |11>}.
using DensityMatrix4 = Eigen::Matrix4cd;

struct EntanglementSample {
  double t = 0.0;
  double concurrence = 0.0;
  double entropy = 0.0;
  double norm = 1.0;
  double mean_photon = 0.0;
  std::array<double, 4> populations{};
  /// Entropies of the single-qubit states rho_1 and rho_2.
  double entropy_q1 = 0.0;
  double entropy_q2 = 0.0;
};

/// rho_12[q, q'] = sum_n psi(q, n) conj(psi(q', n)). Requires layout [2, 2, N].
DensityMatrix4 reduced_density_matrix(const StateVector& psi, const SpaceLayout& layout);

/// Boson-mode density matrix obtained by tracing out both qubits.
ComplexMatrix reduced_boson_density_matrix(const StateVector& psi, const SpaceLayout& layout);

/// Single-qubit state: qubit = 1 traces out the second qubit, qubit = 2 the first.
Eigen::Matrix2cd single_qubit_density_matrix(const DensityMatrix4& rho, int qubit);

/// (sy (x) sy) conj(rho) (sy (x) sy).
DensityMatrix4 spin_flip(const DensityMatrix4& rho);

/// Square roots of the eigenvalues of rho * spin_flip(rho), descending.
/// Evaluated through the Hermitian form sqrt(sqrt(rho) rho~ sqrt(rho)), whose
/// eigenvalues are the singular values of sqrt(rho) sqrt(rho~).
std::array<double, 4> concurrence_spectrum(const DensityMatrix4& rho);

/// Wootters concurrence, clamped to [0, 1].
double concurrence(const DensityMatrix4& rho);

/// -sum lambda log_base(lambda) over the spectrum of a Hermitian PSD matrix,
/// with 0 log 0 = 0. Eigenvalues in [-1e-10, 0) are treated as zero.
double von_neumann_entropy(const ComplexMatrix& rho, double base = 2.0);

struct PopulationReport {
  std::array<double, 4> populations{};
  double mean_photon = 0.0;
};

PopulationReport populations_and_photon(const StateVector& psi, const SpaceLayout& layout);

/// Full per-sample evaluation used by the evolution loop.
EntanglementSample measure(const StateVector& psi, const SpaceLayout& layout, double t,
                           double entropy_base = 2.0);

namespace testing {
/// Fault injection for the verify harness: when enabled, spin_flip uses a
/// sigma_y with one sign flipped on the first qubit.
void set_spin_flip_fault(bool enabled);
bool spin_flip_fault();
}  // namespace testing

}  // namespace qdent
