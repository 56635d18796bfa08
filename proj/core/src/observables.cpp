#include "qdent/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

namespace qdent {

namespace {

std::atomic<bool> g_spin_flip_fault{false};

// Tolerated negativity of eigenvalues before a state is rejected.
constexpr double kStateNegativityTol = 1e-8;

// Relative cutoff below which eigenvalues of rho count as zero.
constexpr double kRankTol = 1e-14;

void require_qubit_layout(const StateVector& psi, const SpaceLayout& layout) {
  if (layout.num_factors() != 3 || layout.factor_dim(0) != 2 || layout.factor_dim(1) != 2)
    throw DimensionError("expected layout [2, 2, N]");
  if (static_cast<std::size_t>(psi.size()) != layout.total_dim())
    throw DimensionError("state dimension " + std::to_string(psi.size()) +
                         " does not match layout dimension " +
                         std::to_string(layout.total_dim()));
}

// Rows index the qubit label, columns the Fock level (row-major flat order).
using ConstStateMap =
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

ConstStateMap as_matrix(const StateVector& psi, const SpaceLayout& layout) {
  return {psi.data(), 4, static_cast<Eigen::Index>(layout.factor_dim(2))};
}

}  // namespace

namespace testing {
void set_spin_flip_fault(bool enabled) { g_spin_flip_fault = enabled; }
bool spin_flip_fault() { return g_spin_flip_fault; }
}  // namespace testing

DensityMatrix4 reduced_density_matrix(const StateVector& psi, const SpaceLayout& layout) {
  require_qubit_layout(psi, layout);
  const auto m = as_matrix(psi, layout);
  DensityMatrix4 rho = m * m.adjoint();
  return rho;
}

ComplexMatrix reduced_boson_density_matrix(const StateVector& psi, const SpaceLayout& layout) {
  require_qubit_layout(psi, layout);
  const auto m = as_matrix(psi, layout);
  // rho_b[n, n'] = sum_q psi(q, n) conj(psi(q, n'))
  return m.transpose() * m.conjugate();
}

Eigen::Matrix2cd single_qubit_density_matrix(const DensityMatrix4& rho, int qubit) {
  if (qubit != 1 && qubit != 2) throw ContractViolation("qubit must be 1 or 2");
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k)
        r(a, b) += qubit == 1 ? rho(2 * a + k, 2 * b + k) : rho(2 * k + a, 2 * k + b);
  return r;
}

DensityMatrix4 spin_flip(const DensityMatrix4& rho) {
  ComplexMatrix y1 = pauli::y();
  if (g_spin_flip_fault) y1(1, 0) = -y1(1, 0);
  const Eigen::Matrix4cd yy = kron(y1, pauli::y());
  return yy * rho.conjugate() * yy;
}

std::array<double, 4> concurrence_spectrum(const DensityMatrix4& rho) {
  if (!is_hermitian(rho)) throw InvalidStateError("density matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(rho);
  Eigen::Vector4d ev = solver.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 0.0);
  for (auto& x : ev) {
    if (x < -kStateNegativityTol)
      throw InvalidStateError("density matrix: eigenvalue " + std::to_string(x) +
                              " is negative");
    // Eigenvalues at round-off level are treated as exact zeros; their square
    // roots would otherwise inject sqrt(eps) noise into the spectrum.
    x = x <= kRankTol * std::max(top, 1.0) ? 0.0 : x;
  }
  const Eigen::Matrix4cd& v = solver.eigenvectors();
  const Eigen::Matrix4cd sqrt_rho = v * ev.cwiseSqrt().asDiagonal() * v.adjoint();
  const Eigen::Matrix4cd sqrt_flip = spin_flip(sqrt_rho);

  // The lambdas are the eigenvalues of sqrt(sqrt(rho) rho~ sqrt(rho)), i.e. the
  // singular values of sqrt(rho) sqrt(rho~), with sqrt(rho~) = spin_flip(sqrt(rho)).
  // The SVD keeps small lambdas accurate to machine precision.
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(sqrt_rho * sqrt_flip);
  std::array<double, 4> lambdas{};
  for (int k = 0; k < 4; ++k) lambdas[k] = svd.singularValues()[k];
  return lambdas;
}

double concurrence(const DensityMatrix4& rho) {
  const auto l = concurrence_spectrum(rho);
  return std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
}

double von_neumann_entropy(const ComplexMatrix& rho, double base) {
  if (!(base > 1.0)) throw ContractViolation("entropy logarithm base must exceed 1");
  const EigenSystem es = hermitian_eigendecompose(rho);
  const double log_base = std::log(base);
  double s = 0.0;
  for (const double lambda : es.values) {
    if (lambda < -kHermitianTol)
      throw InvalidStateError("entropy: eigenvalue " + std::to_string(lambda) + " is negative");
    if (lambda > 0.0) s -= lambda * std::log(lambda) / log_base;
  }
  return std::max(s, 0.0);
}

PopulationReport populations_and_photon(const StateVector& psi, const SpaceLayout& layout) {
  require_qubit_layout(psi, layout);
  const auto m = as_matrix(psi, layout);
  const Eigen::MatrixXd prob = m.cwiseAbs2();
  PopulationReport r;
  for (int q = 0; q < 4; ++q) r.populations[q] = prob.row(q).sum();
  const Eigen::VectorXd per_level = prob.colwise().sum().transpose();
  for (Eigen::Index n = 0; n < per_level.size(); ++n)
    r.mean_photon += static_cast<double>(n) * per_level[n];
  return r;
}

EntanglementSample measure(const StateVector& psi, const SpaceLayout& layout, double t,
                           double entropy_base) {
  EntanglementSample s;
  s.t = t;
  const DensityMatrix4 rho = reduced_density_matrix(psi, layout);
  s.concurrence = concurrence(rho);
  s.entropy = von_neumann_entropy(rho, entropy_base);
  s.entropy_q1 = von_neumann_entropy(single_qubit_density_matrix(rho, 1), entropy_base);
  s.entropy_q2 = von_neumann_entropy(single_qubit_density_matrix(rho, 2), entropy_base);
  s.norm = psi.norm();
  const PopulationReport pr = populations_and_photon(psi, layout);
  s.populations = pr.populations;
  s.mean_photon = pr.mean_photon;
  return s;
}

}  // namespace qdent
