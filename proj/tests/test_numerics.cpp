#include "doctest.h"

#include "glx/numerics.hpp"
#include "glx/rng.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace glx;
using namespace glx::test;

namespace {

// Determinant by cofactor expansion: an independent oracle for log_det on
// small matrices.
double det_cofactor(const Eigen::MatrixXd& m) {
  const int d = static_cast<int>(m.rows());
  if (d == 1) return m(0, 0);
  double det = 0.0;
  double sign = 1.0;
  for (int c = 0; c < d; ++c) {
    Eigen::MatrixXd minor(d - 1, d - 1);
    for (int i = 1; i < d; ++i) {
      int col = 0;
      for (int j = 0; j < d; ++j) {
        if (j == c) continue;
        minor(i - 1, col++) = m(i, j);
      }
    }
    det += sign * m(0, c) * det_cofactor(minor);
    sign = -sign;
  }
  return det;
}

}  // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("symmetric matrix construction and accessors") {
  SymmetricMatrix m = sym({{2.0, 1.0}, {1.0, 3.0}});
  CHECK(m.dim() == 2);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 0) == 1.0);
  m.set(0, 1, -5.0);
  CHECK(m(1, 0) == -5.0);

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 2.0, 3.0, 1.0;
  CHECK_THROWS_AS(SymmetricMatrix::from_dense_checked(asym),
                  std::invalid_argument);
  // Structural symmetrization: lower triangle wins.
  SymmetricMatrix forced = SymmetricMatrix::from_dense(asym);
  CHECK(forced(0, 1) == 3.0);
  CHECK(forced(1, 0) == 3.0);
}

TEST_CASE("sparse symmetric storage round trip and lookup") {
  SparseSymmetricMatrix m(3, Eigen::VectorXd::Ones(3),
                          {{1, 0, 0.5}, {2, 1, -0.25}});
  CHECK(m.nnz_offdiag() == 2);
  CHECK(m.entry(0, 1) == 0.5);
  CHECK(m.entry(1, 0) == 0.5);
  CHECK(m.entry(2, 0) == 0.0);
  Eigen::MatrixXd d = m.to_dense();
  CHECK(d(2, 1) == -0.25);
  CHECK(d(0, 0) == 1.0);
  SparseSymmetricMatrix back = SparseSymmetricMatrix::from_dense(d);
  CHECK(max_abs_diff(back, m) == 0.0);

  // Duplicate entries are rejected at finalize().
  SparseSymmetricMatrix dup(3);
  dup.push_offdiag(1, 0, 1.0);
  dup.push_offdiag(1, 0, 2.0);
  CHECK_THROWS(dup.finalize());
}

TEST_CASE("cholesky of the identity is the identity") {
  CholeskyFactor f = cholesky(SymmetricMatrix::identity(3));
  CHECK(max_abs_diff(f.lower(), Eigen::MatrixXd::Identity(3, 3)) == 0.0);
  CHECK(f.log_det() == 0.0);
}

TEST_CASE("cholesky 2x2 worked example") {
  // [[4,2],[2,3]] = L L^T with L = [[2,0],[1,sqrt(2)]].
  CholeskyFactor f = cholesky(sym({{4.0, 2.0}, {2.0, 3.0}}));
  CHECK(f.lower()(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.lower()(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.lower()(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(f.lower()(0, 1) == 0.0);
  CHECK(f.log_det() == doctest::Approx(std::log(8.0)).epsilon(1e-15));
}

TEST_CASE("cholesky rejects indefinite input with the failing pivot") {
  try {
    cholesky(sym({{1.0, 2.0}, {2.0, 1.0}}));
    FAIL("expected NotPositiveDefiniteError");
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(e.pivot_index == 1);
  }
  int pivot = -1;
  CHECK_FALSE(try_cholesky(sym({{1.0, 2.0}, {2.0, 1.0}}), &pivot).has_value());
  CHECK(pivot == 1);
  CHECK_FALSE(is_positive_definite(sym({{1.0, 2.0}, {2.0, 1.0}})));
  CHECK(is_positive_definite(sym({{1.0, 0.5}, {0.5, 1.0}})));
}

TEST_CASE("cholesky reconstruction accuracy on random PD matrices") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(30));
    SymmetricMatrix m = random_pd(d, rng);
    CholeskyFactor f = cholesky(m);
    const Eigen::MatrixXd rec = f.lower() * f.lower().transpose();
    const double scale = m.dense().cwiseAbs().maxCoeff();
    CHECK(max_abs_diff(rec, m.dense()) <= 1e-10 * scale);
  }
}

TEST_CASE("linear solves") {
  Eigen::VectorXd b(2);
  b << 1.0, 2.0;
  CHECK((solve(SymmetricMatrix::identity(2), b) - b).cwiseAbs().maxCoeff() ==
        0.0);

  Eigen::VectorXd rhs(2);
  rhs << 1.0, 0.0;
  Eigen::VectorXd x = solve(sym({{4.0, 2.0}, {2.0, 3.0}}), rhs);
  CHECK(x[0] == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(-1.0 / 4.0).epsilon(1e-15));

  // Residual check on a random system.
  SplitMix64 rng(12);
  SymmetricMatrix m = random_pd(8, rng);
  Eigen::VectorXd rb(8);
  for (int i = 0; i < 8; ++i) rb[i] = rng.gaussian();
  Eigen::VectorXd sol = solve(m, rb);
  CHECK((m.dense() * sol - rb).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("inverse on diagonal and worked examples") {
  SymmetricMatrix inv = inverse(sym({{2.0, 0.0}, {0.0, 5.0}}));
  CHECK(inv(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(inv(1, 1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(inv(0, 1) == 0.0);

  // The worked path example: its completed matrix inverts to the closed form.
  SymmetricMatrix completed = SymmetricMatrix::from_dense(
      example_path4().dense() + example_path4_complement().dense());
  SymmetricMatrix a = inverse(completed);
  CHECK(max_abs_diff(a, example_path4_inverse()) <= 1e-12);

  CHECK_THROWS_AS(inverse(sym({{1.0, 2.0}, {2.0, 1.0}})),
                  NotPositiveDefiniteError);
}

TEST_CASE("inverse is an involution on random PD matrices") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(20));
    SymmetricMatrix m = random_pd(d, rng);
    SymmetricMatrix round = inverse(inverse(m));
    CHECK(max_abs_diff(round, m) <= 1e-6);
  }
}

TEST_CASE("log_det matches a cofactor-expansion determinant") {
  CHECK(log_det(SymmetricMatrix::identity(5)) == 0.0);
  CHECK(log_det(sym({{2.0, 0.0}, {0.0, 2.0}})) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  SplitMix64 rng(14);
  for (int d = 1; d <= 6; ++d) {
    SymmetricMatrix m = random_pd(d, rng);
    CHECK(log_det(m) ==
          doctest::Approx(std::log(det_cofactor(m.dense()))).epsilon(1e-8));
  }
}

TEST_CASE("extreme eigenvalues on known spectra") {
  EigenBounds b = extreme_eigenvalues(
      sym({{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 3.0}}));
  CHECK(b.min == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(b.max == doctest::Approx(3.0).epsilon(1e-8));

  EigenBounds id = extreme_eigenvalues(SymmetricMatrix::identity(10));
  CHECK(id.min == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(id.max == doctest::Approx(1.0).epsilon(1e-8));

  EigenBounds two = extreme_eigenvalues(sym({{2.0, 1.0}, {1.0, 2.0}}));
  CHECK(two.min == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(two.max == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("extreme eigenvalues bracket Rayleigh quotients") {
  SplitMix64 rng(15);
  SymmetricMatrix m = random_pd(12, rng);
  EigenBounds b = extreme_eigenvalues(m);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd v(12);
    for (int i = 0; i < 12; ++i) v[i] = rng.gaussian();
    const double q = v.dot(m.dense() * v) / v.squaredNorm();
    CHECK(q >= b.min - 1e-9);
    CHECK(q <= b.max + 1e-9);
  }
}

TEST_CASE("norm helpers") {
  SymmetricMatrix id3 = SymmetricMatrix::identity(3);
  CHECK(max_abs_offdiag(id3) == 0.0);
  CHECK(l1_offdiag(id3) == 0.0);
  CHECK(frobenius_norm(id3) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  SymmetricMatrix m = sym({{1.0, 0.3}, {0.3, 1.0}});
  CHECK(max_abs_offdiag(m) == 0.3);
  CHECK(l1_offdiag(m) == doctest::Approx(0.6).epsilon(1e-15));

  CHECK(max_abs_offdiag(example_path4()) == 0.4);

  // Sparse overload agrees with the dense one.
  SparseSymmetricMatrix sp = SparseSymmetricMatrix::from_dense(m.dense());
  CHECK(max_abs_offdiag(sp) == 0.3);
}

TEST_SUITE_END();
