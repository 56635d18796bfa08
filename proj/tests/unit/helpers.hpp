#pragma once

#include <random>

#include "qdent/tensor.hpp"

namespace qdent::test {

inline ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> nd;
  ComplexMatrix m(n, n);
  for (auto& x : m.reshaped()) x = Complex(nd(rng), nd(rng));
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  const ComplexMatrix m = random_matrix(rng, n);
  return 0.5 * (m + m.adjoint());
}

inline StateVector random_state(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> nd;
  StateVector v(n);
  for (auto& x : v) x = Complex(nd(rng), nd(rng));
  return v.normalized();
}

inline double max_err(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qdent::test
