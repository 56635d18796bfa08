#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qdent/tensor.hpp"

using namespace qdent;
using Catch::Matchers::WithinAbs;

TEST_CASE("kron of identities is the identity", "[tensor]") {
  CHECK(kron(pauli::identity(2), pauli::identity(2)) == pauli::identity(4));
}

TEST_CASE("kron(sz, I) is diag(1, 1, -1, -1)", "[tensor]") {
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.diagonal() << 1.0, 1.0, -1.0, -1.0;
  CHECK(kron(pauli::z(), pauli::identity(2)) == expected);
}

TEST_CASE("kron(sx, sx) maps |00> to |11>", "[tensor]") {
  // Hand expansion: sx (x) sx is the anti-diagonal 4x4 matrix of ones.
  ComplexMatrix by_hand = ComplexMatrix::Zero(4, 4);
  by_hand(0, 3) = by_hand(1, 2) = by_hand(2, 1) = by_hand(3, 0) = 1.0;
  const ComplexMatrix xx = kron(pauli::x(), pauli::x());
  CHECK(xx == by_hand);

  StateVector ket00 = StateVector::Zero(4);
  ket00[0] = 1.0;
  StateVector ket11 = StateVector::Zero(4);
  ket11[3] = 1.0;
  CHECK(matvec(xx, ket00) == ket11);
}

TEST_CASE("kron index convention", "[tensor]") {
  std::mt19937_64 rng(1);
  const auto a = test::random_matrix(rng, 3);
  const auto b = test::random_matrix(rng, 2);
  const auto k = kron(a, b);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) CHECK(k(i * 2 + r, j * 2 + c) == a(i, j) * b(r, c));
}

TEST_CASE("kron is associative", "[tensor]") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    const auto a = test::random_matrix(rng, 1 + trial % 3);
    const auto b = test::random_matrix(rng, 2);
    const auto c = test::random_matrix(rng, 1 + trial % 2);
    CHECK(test::max_err(kron(kron(a, b), c), kron(a, kron(b, c))) <= 1e-14);
  }
}

TEST_CASE("kron rejects oversized results", "[tensor]") {
  const ComplexMatrix big = ComplexMatrix::Identity(200, 200);
  CHECK_THROWS_AS(kron(big, big), DimensionError);
}

TEST_CASE("eigendecomposition of Pauli matrices", "[tensor]") {
  const auto z = hermitian_eigendecompose(pauli::z());
  CHECK_THAT(z.values[0], WithinAbs(-1.0, 1e-14));
  CHECK_THAT(z.values[1], WithinAbs(1.0, 1e-14));

  const auto x = hermitian_eigendecompose(pauli::x());
  CHECK_THAT(x.values[0], WithinAbs(-1.0, 1e-14));
  CHECK_THAT(x.values[1], WithinAbs(1.0, 1e-14));
  // Eigenvectors (|0> -/+ |1>)/sqrt2 up to phase.
  const double s = 1.0 / std::numbers::sqrt2;
  StateVector minus(2), plus(2);
  minus << s, -s;
  plus << s, s;
  CHECK_THAT(std::abs(x.vectors.col(0).dot(minus)), WithinAbs(1.0, 1e-12));
  CHECK_THAT(std::abs(x.vectors.col(1).dot(plus)), WithinAbs(1.0, 1e-12));
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices", "[tensor]") {
  std::mt19937_64 rng(3);
  for (Eigen::Index n : {8, 32, 128}) {
    const auto h = test::random_hermitian(rng, n);
    const auto es = hermitian_eigendecompose(h);
    for (Eigen::Index k = 1; k < n; ++k) CHECK(es.values[k - 1] <= es.values[k]);
    const ComplexMatrix rebuilt =
        es.vectors * es.values.cast<Complex>().asDiagonal() * es.vectors.adjoint();
    CHECK(test::max_err(rebuilt, h) < 1e-10 * std::max(1.0, max_abs(h)));
    CHECK(test::max_err(es.vectors.adjoint() * es.vectors, ComplexMatrix::Identity(n, n)) <
          1e-10);
  }
}

TEST_CASE("eigendecomposition rejects non-Hermitian input", "[tensor]") {
  ComplexMatrix m = pauli::x();
  m(0, 1) = 2.0;
  CHECK_THROWS_AS(hermitian_eigendecompose(m), ContractViolation);
}

TEST_CASE("matvec basics", "[tensor]") {
  std::mt19937_64 rng(4);
  const auto v = test::random_state(rng, 5);
  CHECK(matvec(ComplexMatrix::Identity(5, 5), v) == v);

  StateVector ket0(2), ket1(2);
  ket0 << 1.0, 0.0;
  ket1 << 0.0, 1.0;
  CHECK(matvec(pauli::x(), ket0) == ket1);

  CHECK_THROWS_AS(matvec(pauli::x(), v), DimensionError);
}

TEST_CASE("a + a^+ raises the Fock vacuum to |1>", "[tensor]") {
  // Ladder operator for N = 3 written out by hand.
  ComplexMatrix a_hand = ComplexMatrix::Zero(3, 3);
  a_hand(0, 1) = 1.0;
  a_hand(1, 2) = std::sqrt(2.0);
  CHECK(annihilation(3) == a_hand);

  StateVector vac = StateVector::Zero(3), one = StateVector::Zero(3);
  vac[0] = 1.0;
  one[1] = 1.0;
  const ComplexMatrix a = annihilation(3);
  CHECK(test::max_err(matvec(a + a.adjoint(), vac), one) == 0.0);
}

TEST_CASE("matvec is linear", "[tensor]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = test::random_matrix(rng, 16);
    const auto u = test::random_state(rng, 16);
    const auto v = test::random_state(rng, 16);
    std::normal_distribution<double> nd;
    const Complex a(nd(rng), nd(rng)), b(nd(rng), nd(rng));
    const StateVector lhs = matvec(m, a * u + b * v);
    const StateVector rhs = a * matvec(m, u) + b * matvec(m, v);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("matrix_sqrt_psd", "[tensor]") {
  CHECK(test::max_err(matrix_sqrt_psd(pauli::identity(3)), pauli::identity(3)) < 1e-14);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d.diagonal() << 4.0, 9.0;
  ComplexMatrix root = ComplexMatrix::Zero(2, 2);
  root.diagonal() << 2.0, 3.0;
  CHECK(test::max_err(matrix_sqrt_psd(d), root) < 1e-14);

  // A projector is its own square root.
  StateVector bell = StateVector::Zero(4);
  bell[1] = bell[2] = 1.0 / std::numbers::sqrt2;
  const ComplexMatrix proj = bell * bell.adjoint();
  CHECK(test::max_err(matrix_sqrt_psd(proj), proj) < 1e-12);

  std::mt19937_64 rng(6);
  const auto g = test::random_matrix(rng, 12);
  const ComplexMatrix psd = g * g.adjoint();
  const ComplexMatrix r = matrix_sqrt_psd(psd);
  CHECK(hermiticity_defect(r) < 1e-12);
  CHECK(test::max_err(r * r, psd) <= 1e-9);

  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg.diagonal() << 1.0, -1e-6;
  CHECK_THROWS_AS(matrix_sqrt_psd(neg), PositivityError);
  neg(1, 1) = -1e-12;
  CHECK_NOTHROW(matrix_sqrt_psd(neg));
}

TEST_CASE("SpaceLayout flat index round trip", "[tensor]") {
  for (std::size_t n : {2u, 3u, 12u, 16u}) {
    const SpaceLayout layout({2, 2, n});
    CHECK(layout.total_dim() == 4 * n);
    for (std::size_t i = 0; i < layout.total_dim(); ++i)
      CHECK(layout.flatten(layout.unflatten(i)) == i);
  }
  const SpaceLayout layout({2, 2, 3});
  CHECK(layout.flatten({0, 1, 0}) == 3);
  CHECK(layout.flatten({1, 0, 2}) == 8);
  CHECK_THROWS_AS(layout.flatten({0, 2, 0}), DimensionError);
  CHECK_THROWS_AS(layout.unflatten(12), DimensionError);
  CHECK_THROWS_AS(SpaceLayout({2, 0}), DimensionError);
}
