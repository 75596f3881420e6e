#include "doctest.h"

#include "glx/metrics.hpp"
#include "glx/rng.hpp"
#include "glx/solver.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace glx;
using namespace glx::test;

namespace {

SparseSymmetricMatrix sparse_unit(int d,
                                  std::vector<std::tuple<int, int, double>> e) {
  SparseSymmetricMatrix m(d);
  m.mutable_diagonal().setOnes();
  for (auto [i, j, v] : e) m.push_offdiag(std::max(i, j), std::min(i, j), v);
  m.finalize();
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("support rates on hand-checked patterns") {
  SparseSymmetricMatrix truth =
      sparse_unit(4, {{0, 1, 1.0}, {1, 2, -1.0}});

  // Perfect recovery.
  SupportRates perfect = tpr_fpr(truth, truth);
  CHECK(perfect.tpr == 1.0);
  CHECK(perfect.fpr == 0.0);
  CHECK(perfect.true_positives == 2);
  CHECK(perfect.actual_positives == 2);
  CHECK(perfect.actual_negatives == 4);

  // A diagonal estimate recovers nothing.
  SupportRates nothing = tpr_fpr(sparse_unit(4, {}), truth);
  CHECK(nothing.tpr == 0.0);
  CHECK(nothing.fpr == 0.0);

  // A full estimate hits everything, true and spurious alike.
  SparseSymmetricMatrix full = sparse_unit(
      4, {{0, 1, 1.}, {0, 2, 1.}, {0, 3, 1.}, {1, 2, 1.}, {1, 3, 1.}, {2, 3, 1.}});
  SupportRates all = tpr_fpr(full, truth);
  CHECK(all.tpr == 1.0);
  CHECK(all.fpr == 1.0);
  CHECK(all.false_positives == 4);

  // Cutoffs suppress sub-threshold entries.
  SparseSymmetricMatrix tiny = sparse_unit(4, {{0, 1, 1e-12}});
  CHECK(tpr_fpr(tiny, truth, 1e-9, 0.0).tpr == 0.0);

  // Degenerate denominators take the documented conventions.
  SupportRates no_truth = tpr_fpr(sparse_unit(2, {}), sparse_unit(2, {}));
  CHECK(no_truth.tpr == 1.0);  // no true edges to miss
  CHECK(no_truth.fpr == 0.0);
}

TEST_CASE("relative Frobenius error") {
  SparseSymmetricMatrix a = sparse_unit(3, {{0, 1, 0.5}});
  CHECK(rel_frobenius(a, a) == 0.0);

  // Frozen example: estimate differs in a single off-diagonal entry.
  SparseSymmetricMatrix b = sparse_unit(3, {{0, 1, 0.3}});
  // diff^2 = 2*(0.2)^2, ref^2 = 3 + 2*(0.3)^2.
  const double expect = std::sqrt(2.0 * 0.04 / (3.0 + 2.0 * 0.09));
  CHECK(rel_frobenius(a, b) == doctest::Approx(expect).epsilon(1e-14));

  // Symmetric in magnitude, not in the reference normalization.
  CHECK(rel_frobenius(a, b) != rel_frobenius(b, a));
}

TEST_CASE("similarity degree on identity-shifted estimates") {
  SparseSymmetricMatrix a = sparse_unit(3, {{0, 1, 0.5}});
  CHECK(similarity_degree(a, a) == doctest::Approx(1.0).epsilon(1e-15));

  // Negated off-diagonal part: cosine -1.
  SparseSymmetricMatrix neg = sparse_unit(3, {{0, 1, -0.5}});
  CHECK(similarity_degree(a, neg) == doctest::Approx(-1.0).epsilon(1e-15));

  // Orthogonal supports: cosine 0.
  SparseSymmetricMatrix other = sparse_unit(3, {{1, 2, 0.7}});
  CHECK(similarity_degree(a, other) == doctest::Approx(0.0).epsilon(1e-15));

  // Identity vs identity: both shifted parts vanish; convention 1.
  CHECK(similarity_degree(sparse_unit(3, {}), sparse_unit(3, {})) == 1.0);
  // Exactly one vanishes: convention 0.
  CHECK(similarity_degree(sparse_unit(3, {}), a) == 0.0);

  // Scale invariance of the cosine in the off-diagonal part.
  SparseSymmetricMatrix scaled = sparse_unit(3, {{0, 1, 0.1}});
  CHECK(similarity_degree(a, scaled) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("similarity degree is symmetric and bounded") {
  SplitMix64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 3 + static_cast<int>(rng.below(6));
    SymmetricMatrix a = random_pd(d, rng), b = random_pd(d, rng);
    SparseSymmetricMatrix sa = SparseSymmetricMatrix::from_dense(a.dense());
    SparseSymmetricMatrix sb = SparseSymmetricMatrix::from_dense(b.dense());
    const double s = similarity_degree(sa, sb);
    CHECK(s == similarity_degree(sb, sa));
    CHECK(s <= 1.0 + 1e-12);
    CHECK(s >= -1.0 - 1e-12);
  }
}

TEST_CASE("optimality gap against a solved reference") {
  CovarianceInput c = cov({{1.0, 0.5}, {0.5, 1.0}});
  SolverConfig cfg;
  cfg.tol = 1e-10;
  GlSolution ref = glasso_solve(c, 0.1, cfg);

  // The reference against itself: zero gap.
  OptimalityGap self = optimality_gap(c, ref.estimate, ref.estimate, 0.1);
  CHECK(std::abs(self.absolute) <= 1e-12);
  CHECK(std::abs(self.relative) <= 1e-12);
  CHECK(self.reference_objective ==
        doctest::Approx(gl_objective(c, ref.estimate, 0.1)).epsilon(1e-12));

  // A worse candidate has a positive gap that matches the raw difference.
  SparseSymmetricMatrix worse = sparse_unit(2, {});
  OptimalityGap g = optimality_gap(c, worse, ref.estimate, 0.1);
  const double direct =
      gl_objective(c, worse, 0.1) - gl_objective(c, ref.estimate, 0.1);
  CHECK(g.absolute == doctest::Approx(direct).epsilon(1e-9));
  CHECK(g.absolute > 0.0);
  CHECK(g.relative ==
        doctest::Approx(direct / std::abs(self.reference_objective))
            .epsilon(1e-9));
}

TEST_CASE("gap computation survives nearly identical inputs") {
  // The cancellation-prone regime: candidate and reference differ by 1e-9.
  CovarianceInput c = cov({{1.0, 0.5}, {0.5, 1.0}});
  SolverConfig cfg;
  cfg.tol = 1e-11;
  GlSolution ref = glasso_solve(c, 0.1, cfg);
  SparseSymmetricMatrix nudged = ref.estimate;
  nudged.mutable_diagonal()[0] += 1e-9;
  OptimalityGap g = optimality_gap(c, nudged, ref.estimate, 0.1);
  CHECK(std::isfinite(g.absolute));
  CHECK(std::abs(g.absolute) <= 1e-7);
}

TEST_SUITE_END();
