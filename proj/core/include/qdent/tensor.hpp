#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qdent/errors.hpp"

namespace qdent {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Upper bound on the dimension produced by kron(); the composite spaces here
/// are O(100), anything near this limit is a configuration mistake.
inline constexpr Eigen::Index kMaxDim = 1 << 13;

/// Absolute tolerance used for Hermiticity and positivity contracts.
inline constexpr double kHermitianTol = 1e-10;

/// Ordered tensor-product factors, e.g. [2, 2, n_fock] for qubit1 (x) qubit2
/// (x) boson. Flat indices are row-major: the last factor varies fastest.
class SpaceLayout {
 public:
  explicit SpaceLayout(std::vector<std::size_t> factor_dims);

  const std::vector<std::size_t>& factor_dims() const { return dims_; }
  std::size_t factor_dim(std::size_t k) const { return dims_.at(k); }
  std::size_t num_factors() const { return dims_.size(); }
  std::size_t total_dim() const { return total_; }

  std::size_t flatten(const std::vector<std::size_t>& multi) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;

  bool operator==(const SpaceLayout&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_;
};

struct EigenSystem {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

double hermiticity_defect(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

EigenSystem hermitian_eigendecompose(const ComplexMatrix& m);

StateVector matvec(const ComplexMatrix& m, const StateVector& v);

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues in [-1e-10, 0) are clamped to zero; anything more negative
/// raises PositivityError.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m);

double max_abs(const ComplexMatrix& m);

namespace pauli {
ComplexMatrix identity(Eigen::Index n);
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

/// Truncated annihilation operator on the Fock states |0>..|n-1>.
ComplexMatrix annihilation(Eigen::Index n_fock);

}  // namespace qdent
