#include "glx/metrics.hpp"

#include "glx/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace glx {

namespace {

// Merge two sorted off-diagonal entry lists, invoking f(value_a, value_b)
// for every pair present in either (absent side contributes 0.0).
template <typename F>
void merge_offdiag(const std::vector<OffDiagEntry>& a,
                   const std::vector<OffDiagEntry>& b, F&& f) {
  std::size_t p = 0, q = 0;
  auto key = [](const OffDiagEntry& e) { return std::make_pair(e.j, e.i); };
  while (p < a.size() || q < b.size()) {
    if (q == b.size() || (p < a.size() && key(a[p]) < key(b[q]))) {
      f(a[p].value, 0.0);
      ++p;
    } else if (p == a.size() || key(b[q]) < key(a[p])) {
      f(0.0, b[q].value);
      ++q;
    } else {
      f(a[p].value, b[q].value);
      ++p;
      ++q;
    }
  }
}

}  // namespace

SupportRates tpr_fpr(const SparseSymmetricMatrix& estimate,
                     const SparseSymmetricMatrix& truth,
                     double cutoff_estimate, double cutoff_truth) {
  if (estimate.dim() != truth.dim())
    throw DimensionMismatchError("tpr_fpr: dimension mismatch");
  SupportRates r;
  const std::int64_t d = estimate.dim();
  std::int64_t est_edges = 0;
  merge_offdiag(estimate.offdiag(), truth.offdiag(),
                [&](double ev, double tv) {
                  const bool in_est = std::abs(ev) > cutoff_estimate;
                  const bool in_truth = std::abs(tv) > cutoff_truth;
                  if (in_truth) ++r.actual_positives;
                  if (in_est) ++est_edges;
                  if (in_est && in_truth) ++r.true_positives;
                  if (in_est && !in_truth) ++r.false_positives;
                });
  r.actual_negatives = d * (d - 1) / 2 - r.actual_positives;
  r.tpr = r.actual_positives == 0
              ? 1.0
              : static_cast<double>(r.true_positives) /
                    static_cast<double>(r.actual_positives);
  r.fpr = r.actual_negatives == 0
              ? 0.0
              : static_cast<double>(r.false_positives) /
                    static_cast<double>(r.actual_negatives);
  return r;
}

double rel_frobenius(const SparseSymmetricMatrix& estimate,
                     const SparseSymmetricMatrix& reference) {
  if (estimate.dim() != reference.dim())
    throw DimensionMismatchError("rel_frobenius: dimension mismatch");
  double diff2 = 0.0, ref2 = 0.0;
  for (int i = 0; i < estimate.dim(); ++i) {
    const double e = estimate.diagonal()[i], r = reference.diagonal()[i];
    diff2 += (e - r) * (e - r);
    ref2 += r * r;
  }
  merge_offdiag(estimate.offdiag(), reference.offdiag(),
                [&](double ev, double rv) {
                  diff2 += 2.0 * (ev - rv) * (ev - rv);
                  ref2 += 2.0 * rv * rv;
                });
  if (ref2 == 0.0)
    return diff2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(diff2 / ref2);
}

double similarity_degree(const SparseSymmetricMatrix& a,
                         const SparseSymmetricMatrix& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatchError("similarity_degree: dimension mismatch");
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double ai = a.diagonal()[i] - 1.0;
    const double bi = b.diagonal()[i] - 1.0;
    dot += ai * bi;
    na2 += ai * ai;
    nb2 += bi * bi;
  }
  merge_offdiag(a.offdiag(), b.offdiag(), [&](double av, double bv) {
    dot += 2.0 * av * bv;
    na2 += 2.0 * av * av;
    nb2 += 2.0 * bv * bv;
  });
  if (na2 == 0.0 && nb2 == 0.0) return 1.0;
  if (na2 == 0.0 || nb2 == 0.0) return 0.0;
  return dot / (std::sqrt(na2) * std::sqrt(nb2));
}

OptimalityGap optimality_gap(const CovarianceInput& c,
                             const SparseSymmetricMatrix& candidate,
                             const SparseSymmetricMatrix& reference,
                             double lambda) {
  const int d = c.dim();
  if (candidate.dim() != d || reference.dim() != d)
    throw DimensionMismatchError("optimality_gap: dimension mismatch");

  // log det candidate - log det reference = sum log1p(nu_i), nu the
  // eigenvalues of L^{-1} Delta L^{-T}; immune to the near-total cancellation
  // a direct logdet difference suffers when the two matrices nearly agree.
  CholeskyFactor f = cholesky(reference.to_symmetric());
  const Eigen::MatrixXd delta =
      candidate.to_dense() - reference.to_dense();
  Eigen::MatrixXd x =
      f.lower().triangularView<Eigen::Lower>().solve(delta);
  Eigen::MatrixXd m =
      f.lower().triangularView<Eigen::Lower>().solve(x.transpose());
  m = (0.5 * (m + m.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      m, Eigen::EigenvaluesOnly);
  long double logdet_diff = 0.0L;
  for (int i = 0; i < d; ++i) {
    const double nu = es.eigenvalues()[i];
    if (nu <= -1.0) throw NotPositiveDefiniteError(-1);
    logdet_diff += static_cast<long double>(std::log1p(nu));
  }

  // Trace and l1 terms on the difference, accumulated pairwise in extended
  // precision.
  const auto& sig = c.sigma.dense();
  long double trace_term = 0.0L, l1_term = 0.0L;
  for (int i = 0; i < d; ++i)
    trace_term +=
        static_cast<long double>(sig(i, i)) *
        (static_cast<long double>(candidate.diagonal()[i]) -
         static_cast<long double>(reference.diagonal()[i]));
  {
    const auto& ca = candidate.offdiag();
    const auto& rb = reference.offdiag();
    std::size_t p = 0, q = 0;
    auto key = [](const OffDiagEntry& e) { return std::make_pair(e.j, e.i); };
    while (p < ca.size() || q < rb.size()) {
      int i, j;
      double cv = 0.0, rv = 0.0;
      if (q == rb.size() || (p < ca.size() && key(ca[p]) < key(rb[q]))) {
        i = ca[p].i; j = ca[p].j; cv = ca[p].value; ++p;
      } else if (p == ca.size() || key(rb[q]) < key(ca[p])) {
        i = rb[q].i; j = rb[q].j; rv = rb[q].value; ++q;
      } else {
        i = ca[p].i; j = ca[p].j; cv = ca[p].value; rv = rb[q].value;
        ++p; ++q;
      }
      trace_term += 2.0L * static_cast<long double>(sig(i, j)) *
                    (static_cast<long double>(cv) - static_cast<long double>(rv));
      l1_term += 2.0L * (static_cast<long double>(std::abs(cv)) -
                         static_cast<long double>(std::abs(rv)));
    }
  }

  OptimalityGap gap;
  gap.absolute = static_cast<double>(
      -logdet_diff + trace_term + static_cast<long double>(lambda) * l1_term);
  gap.reference_objective = gl_objective(c, reference, lambda);
  const double denom = std::abs(gap.reference_objective);
  gap.relative = denom > 0.0
                     ? gap.absolute / denom
                     : (gap.absolute == 0.0
                            ? 0.0
                            : std::numeric_limits<double>::infinity());
  return gap;
}

}  // namespace glx
