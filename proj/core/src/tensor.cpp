#include "qdent/tensor.hpp"

#include <cmath>
#include <string>

namespace qdent {

SpaceLayout::SpaceLayout(std::vector<std::size_t> factor_dims)
    : dims_(std::move(factor_dims)), total_(1) {
  if (dims_.empty()) throw DimensionError("SpaceLayout needs at least one factor");
  for (auto d : dims_) {
    if (d == 0) throw DimensionError("SpaceLayout factor dimension must be positive");
    total_ *= d;
  }
}

std::size_t SpaceLayout::flatten(const std::vector<std::size_t>& multi) const {
  if (multi.size() != dims_.size())
    throw DimensionError("multi-index rank does not match layout");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (multi[k] >= dims_[k]) throw DimensionError("multi-index component out of range");
    flat = flat * dims_[k] + multi[k];
  }
  return flat;
}

std::vector<std::size_t> SpaceLayout::unflatten(std::size_t flat) const {
  if (flat >= total_) throw DimensionError("flat index out of range");
  std::vector<std::size_t> multi(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    multi[k] = flat % dims_[k];
    flat /= dims_[k];
  }
  return multi;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols())
    throw DimensionError("kron expects square matrices");
  const Eigen::Index na = a.rows();
  const Eigen::Index nb = b.rows();
  if (na != 0 && nb > kMaxDim / na)
    throw DimensionError("kron result dimension " + std::to_string(na) + "x" +
                         std::to_string(nb) + " exceeds the configured maximum");
  ComplexMatrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < na; ++j)
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
  return out;
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && (m.size() == 0 || hermiticity_defect(m) <= tol);
}

EigenSystem hermitian_eigendecompose(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("eigendecomposition of non-square matrix");
  if (!is_hermitian(m))
    throw ContractViolation("eigendecomposition input is not Hermitian (defect " +
                            std::to_string(hermiticity_defect(m)) + ")");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

StateVector matvec(const ComplexMatrix& m, const StateVector& v) {
  if (m.rows() != m.cols() || m.cols() != v.size())
    throw DimensionError("matvec: matrix " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " vs vector " + std::to_string(v.size()));
  return m * v;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
  const EigenSystem es = hermitian_eigendecompose(m);
  RealVector roots(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const double lambda = es.values[k];
    if (lambda < -kHermitianTol)
      throw PositivityError("matrix_sqrt_psd: eigenvalue " + std::to_string(lambda) +
                            " below zero");
    roots[k] = std::sqrt(std::max(lambda, 0.0));
  }
  ComplexMatrix r = es.vectors * roots.asDiagonal() * es.vectors.adjoint();
  return 0.5 * (r + r.adjoint());
}

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

namespace pauli {

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

ComplexMatrix annihilation(Eigen::Index n_fock) {
  if (n_fock < 1) throw DimensionError("Fock cutoff must be positive");
  ComplexMatrix a = ComplexMatrix::Zero(n_fock, n_fock);
  for (Eigen::Index n = 1; n < n_fock; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

}  // namespace qdent
