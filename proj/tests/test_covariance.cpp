#include "doctest.h"

#include "glx/covariance.hpp"
#include "glx/datagen.hpp"
#include "glx/rng.hpp"
#include "test_support.hpp"

#include <cmath>
#include <stdexcept>

using namespace glx;
using namespace glx::test;

TEST_SUITE_BEGIN("covariance");

TEST_CASE("covariance input requires a positive diagonal") {
  CHECK_THROWS_AS(CovarianceInput(sym({{0.0, 0.0}, {0.0, 1.0}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(CovarianceInput(sym({{1.0, 0.0}, {0.0, -2.0}})),
                  std::invalid_argument);
  CovarianceInput ok = cov({{1.0, 0.5}, {0.5, 1.0}});
  CHECK(ok.dim() == 2);
}

TEST_CASE("scaling diagonal carries entries and their square roots") {
  ScalingDiagonal s = scaling_diagonal(cov({{4.0, 0.0}, {0.0, 9.0}}));
  CHECK(s.d[0] == 4.0);
  CHECK(s.d[1] == 9.0);
  CHECK(s.sqrt_d[0] == 2.0);
  CHECK(s.sqrt_d[1] == 3.0);
}

TEST_CASE("sample covariance on a two-point data set") {
  SampleSet s;
  s.rows = Eigen::MatrixXd(2, 2);
  s.rows << 0.0, 0.0, 2.0, 2.0;
  CovarianceInput c = sample_covariance(s);
  // Mean (1,1); deviations (-1,-1) and (1,1); 1/n normalization.
  CHECK(c.sigma(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.sigma(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.sigma(1, 1) == doctest::Approx(1.0).epsilon(1e-15));

  CovarianceInput u = sample_covariance(s, /*unbiased=*/true);
  CHECK(u.sigma(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sample covariance rejects degenerate inputs") {
  SampleSet tiny;
  tiny.rows = Eigen::MatrixXd(1, 2);
  tiny.rows << 1.0, 2.0;
  CHECK_THROWS_AS(sample_covariance(tiny), std::invalid_argument);

  // A constant column has zero variance: the covariance is not usable.
  SampleSet constant;
  constant.rows = Eigen::MatrixXd(3, 2);
  constant.rows << 1.0, 5.0, 1.0, 7.0, 1.0, 6.0;
  CHECK_THROWS_AS(sample_covariance(constant), std::invalid_argument);
}

TEST_CASE("sample covariance concentrates for large n") {
  // 10000 draws from a known 3x3 covariance; every entry within 0.1.
  SymmetricMatrix truth = unit_with(3, {{0, 1, 0.5}, {1, 2, -0.3}});
  CovarianceInput c(truth);
  SampleSet s = sample_gaussian(c, 10000, 99);
  CovarianceInput est = sample_covariance(s);
  CHECK(max_abs_diff(est.sigma, truth) <= 0.1);
}

TEST_CASE("residue soft-thresholds with a strict cutoff") {
  CovarianceInput c = cov({{1.0, 0.5}, {0.5, 1.0}});
  ResidueMatrix r = residue(c, 0.2);
  CHECK(r.entries.entry(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(r.normalized.entry(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(r.max_abs_normalized == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(r.entries.diagonal().cwiseAbs().maxCoeff() == 0.0);

  // Non-unit diagonal: the normalized entry divides by sqrt(sigma_ii sigma_jj).
  ResidueMatrix r2 = residue(cov({{2.0, 1.0}, {1.0, 2.0}}), 0.5);
  CHECK(r2.entries.entry(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r2.normalized.entry(0, 1) == doctest::Approx(0.25).epsilon(1e-15));

  // lambda at or above every magnitude kills all entries (strict inequality).
  CHECK(residue(c, 0.5).entries.nnz_offdiag() == 0);
  CHECK(residue(c, 0.6).entries.nnz_offdiag() == 0);

  // Signs shrink toward zero, never across it.
  ResidueMatrix neg = residue(cov({{1.0, -0.5}, {-0.5, 1.0}}), 0.2);
  CHECK(neg.entries.entry(0, 1) == doctest::Approx(-0.3).epsilon(1e-15));

  CHECK_THROWS_AS(residue(c, -0.1), std::invalid_argument);
}

TEST_CASE("residue magnitude identity on the kept support") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 3 + static_cast<int>(rng.below(8));
    SymmetricMatrix m(d);
    for (int i = 0; i < d; ++i) m.set(i, i, 1.0 + rng.uniform01());
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (rng.uniform01() < 0.5) m.set(i, j, rng.uniform(-0.8, 0.8));
    CovarianceInput c(m);
    const double lambda = rng.uniform(0.0, 0.5);
    ResidueMatrix r = residue(c, lambda);
    for (const auto& e : r.entries.offdiag()) {
      CHECK(std::abs(e.value) ==
            doctest::Approx(std::abs(m(e.i, e.j)) - lambda).epsilon(1e-12));
      CHECK(e.value * m(e.i, e.j) > 0.0);  // same sign as the source entry
    }
  }
}

TEST_CASE("magnitude ladder on worked examples") {
  // Distinct magnitudes 0.4 > 0.3, one zero pair.
  CovarianceInput c3(unit_with(3, {{0, 1, 0.3}, {1, 2, -0.4}}));
  MagnitudeLadder l3 = magnitude_ladder(c3);
  REQUIRE(l3.size() == 2);
  CHECK(l3.values[0] == 0.4);
  CHECK(l3.values[1] == 0.3);
  CHECK(l3.multiplicity[0] == 1);
  CHECK(l3.multiplicity[1] == 1);
  CHECK(l3.num_offdiag_nonzero == 2);

  // The identity has no nonzero magnitudes at all.
  MagnitudeLadder lid = magnitude_ladder(CovarianceInput(SymmetricMatrix::identity(4)));
  CHECK(lid.size() == 0);
  CHECK(lid.num_offdiag_nonzero == 0);

  // The worked path example: three distinct rungs, zeros unlisted.
  MagnitudeLadder lp = magnitude_ladder(CovarianceInput(example_path4()));
  REQUIRE(lp.size() == 3);
  CHECK(lp.values[0] == 0.4);
  CHECK(lp.values[1] == 0.3);
  CHECK(lp.values[2] == 0.2);
  CHECK(lp.num_offdiag_nonzero == 3);

  // Ties are aggregated with multiplicity.
  MagnitudeLadder lt =
      magnitude_ladder(CovarianceInput(unit_with(3, {{0, 1, 0.3}, {0, 2, -0.3}})));
  REQUIRE(lt.size() == 1);
  CHECK(lt.values[0] == 0.3);
  CHECK(lt.multiplicity[0] == 2);
}

TEST_CASE("lambda_for_k picks interval midpoints") {
  CovarianceInput c(example_path4());  // magnitudes 0.4 > 0.3 > 0.2
  CHECK(lambda_for_k(c, 1) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(lambda_for_k(c, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(lambda_for_k(c, 3) == doctest::Approx(0.10).epsilon(1e-15));
  // k = 0: everything killed, slightly above the top magnitude.
  CHECK(lambda_for_k(c, 0) == doctest::Approx(0.4 * 1.01).epsilon(1e-15));
  CHECK_THROWS_AS(lambda_for_k(c, 4), std::out_of_range);
  CHECK_THROWS_AS(lambda_for_k(c, -1), std::out_of_range);

  // A magnitude tie makes exactly-k unattainable at the tied rung.
  CovarianceInput tie(unit_with(3, {{0, 1, 0.3}, {0, 2, -0.3}}));
  try {
    lambda_for_k(tie, 1);
    FAIL("expected TieAtBoundaryError");
  } catch (const TieAtBoundaryError& e) {
    CHECK(e.magnitude == 0.3);
  }
  CHECK(lambda_for_k(tie, 2) == doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("lambda_for_k really yields k surviving pairs across the ladder") {
  SplitMix64 rng(22);
  SymmetricMatrix m(6);
  for (int i = 0; i < 6; ++i) m.set(i, i, 1.0);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (rng.uniform01() < 0.7) m.set(i, j, rng.uniform(-0.9, 0.9));
  CovarianceInput c(m);
  MagnitudeLadder ladder = magnitude_ladder(c);
  for (int k = 0; k <= ladder.num_offdiag_nonzero; ++k) {
    double lambda;
    try {
      lambda = lambda_for_k(c, k);
    } catch (const TieAtBoundaryError&) {
      continue;  // random ties are legitimately unattainable
    }
    CHECK(residue(c, lambda).entries.nnz_offdiag() == k);
  }
}

TEST_CASE("residue support is constant inside a ladder interval") {
  CovarianceInput c(example_path4());
  // Interval (0.3, 0.4): exactly the single 0.4-magnitude pair survives.
  for (double lambda : {0.301, 0.35, 0.399}) {
    ResidueMatrix r = residue(c, lambda);
    REQUIRE(r.entries.nnz_offdiag() == 1);
    CHECK(r.entries.offdiag()[0].i == 2);
    CHECK(r.entries.offdiag()[0].j == 1);
  }
  // Support shrinks monotonically in lambda.
  std::int64_t prev = 100;
  for (double lambda : {0.0, 0.1, 0.25, 0.35, 0.45}) {
    const std::int64_t nnz = residue(c, lambda).entries.nnz_offdiag();
    CHECK(nnz <= prev);
    prev = nnz;
  }
}

TEST_CASE("hard_threshold_topk keeps the k largest magnitudes") {
  CovarianceInput c(example_path4());
  SparseSymmetricMatrix k0 = hard_threshold_topk(c, 0);
  CHECK(k0.nnz_offdiag() == 0);
  CHECK(k0.diagonal()[0] == 1.0);

  SparseSymmetricMatrix k2 = hard_threshold_topk(c, 2);
  CHECK(k2.nnz_offdiag() == 2);
  CHECK(k2.entry(1, 2) == -0.4);
  CHECK(k2.entry(0, 1) == 0.3);
  CHECK(k2.entry(2, 3) == 0.0);

  // k = all keeps the matrix unchanged.
  SparseSymmetricMatrix kall = hard_threshold_topk(c, 3);
  CHECK(max_abs_diff(kall.to_dense(), c.sigma.dense()) == 0.0);

  CovarianceInput tie(unit_with(3, {{0, 1, 0.3}, {0, 2, -0.3}}));
  CHECK_THROWS_AS(hard_threshold_topk(tie, 1), TieAtBoundaryError);

  // topk at k agrees with residue support at lambda_for_k(k).
  ResidueMatrix r = residue(c, lambda_for_k(c, 2));
  CHECK(same_support(r.entries, k2, 0.0, 0.0));
}

TEST_SUITE_END();
