#pragma once

// Support-recovery and accuracy metrics: TPR/FPR, relative Frobenius error,
// normalized similarity degree, and the numerically stable optimality gap.

#include "glx/covariance.hpp"
#include "glx/numerics.hpp"

#include <limits>

namespace glx {

struct SupportRates {
  double tpr = 0.0;  // recovered true edges / true edges; 1.0 when no true edges
  double fpr = 0.0;  // spurious edges / true non-edges; 0.0 when no non-edges
  std::int64_t true_positives = 0;
  std::int64_t false_positives = 0;
  std::int64_t actual_positives = 0;
  std::int64_t actual_negatives = 0;
};

// Off-diagonal support comparison with per-side magnitude cutoffs
// (|entry| <= cutoff counts as absent).
SupportRates tpr_fpr(const SparseSymmetricMatrix& estimate,
                     const SparseSymmetricMatrix& truth,
                     double cutoff_estimate = 0.0, double cutoff_truth = 0.0);

// ||estimate - reference||_F / ||reference||_F.
double rel_frobenius(const SparseSymmetricMatrix& estimate,
                     const SparseSymmetricMatrix& reference);

// cos angle between the identity-stripped matrices:
// <A - I, B - I> / (||A - I||_F ||B - I||_F); 1 exactly when both strips are
// zero (both diagonal), 0 when exactly one is.
double similarity_degree(const SparseSymmetricMatrix& a,
                         const SparseSymmetricMatrix& b);

struct OptimalityGap {
  double absolute = 0.0;  // f(candidate) - f(reference)
  double relative = 0.0;  // absolute / |f(reference)|
  double reference_objective = 0.0;
};

// Gap evaluated on the difference Delta = candidate - reference:
// logdet(candidate) - logdet(reference) = sum log1p(nu_i) with nu the
// eigenvalues of L^{-1} Delta L^{-T} (reference = L L^T), the trace and l1
// terms accumulated entrywise in extended precision. Exact cancellation-free
// down to ~1e-18 of unit scale; both arguments must be PD.
OptimalityGap optimality_gap(const CovarianceInput& c,
                             const SparseSymmetricMatrix& candidate,
                             const SparseSymmetricMatrix& reference,
                             double lambda);

// Everything above bundled against a known truth (support rates against the
// truth's pattern) and an optimality reference (usually a high-tolerance
// numerical solve).
struct AccuracyReport {
  SupportRates rates;
  double rel_frobenius = std::numeric_limits<double>::quiet_NaN();
  double similarity = std::numeric_limits<double>::quiet_NaN();
  OptimalityGap gap;
};

}  // namespace glx
