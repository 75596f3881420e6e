#pragma once

// Sample covariance, soft-threshold residue, the sorted off-diagonal
// magnitude ladder, and threshold selection by index k.

#include "glx/numerics.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace glx {

struct TieAtBoundaryError : std::runtime_error {
  TieAtBoundaryError(double magnitude, const std::string& what_arg)
      : std::runtime_error(what_arg), magnitude(magnitude) {}
  double magnitude;
};

struct DegenerateEntryError : std::runtime_error {
  DegenerateEntryError(int i, int j, double value)
      : std::runtime_error("normalized residue entry (" + std::to_string(i) +
                           "," + std::to_string(j) + ") has magnitude " +
                           std::to_string(value) + " >= 1"),
        i(i), j(j), value(value) {}
  int i, j;
  double value;
};

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

// n observations of a d-variate vector, rows = observations.
struct SampleSet {
  Eigen::MatrixXd rows;
  int n() const { return static_cast<int>(rows.rows()); }
  int d() const { return static_cast<int>(rows.cols()); }
};

// A covariance matrix ready for thresholding. Positive diagonal enforced at
// construction; positive semidefiniteness is NOT required (the estimator only
// needs the dual box to contain a PD point).
struct CovarianceInput {
  SymmetricMatrix sigma;
  explicit CovarianceInput(SymmetricMatrix s);
  int dim() const { return sigma.dim(); }
};

// Diagonal scaling D = diag(sigma): kept as the vector of diagonal entries
// plus their square roots, used to pass between Sigma and the normalized
// unit-diagonal world.
struct ScalingDiagonal {
  Eigen::VectorXd d;       // sigma_ii
  Eigen::VectorXd sqrt_d;  // sqrt(sigma_ii)
};

ScalingDiagonal scaling_diagonal(const CovarianceInput& c);

// ---------------------------------------------------------------------------
// Residue
// ---------------------------------------------------------------------------

// Soft-thresholded covariance at level lambda:
//   entry (i != j):  sigma_ij - lambda * sign(sigma_ij)   if |sigma_ij| > lambda
//                    0                                     otherwise
//   diagonal: identically zero.
// `normalized` carries D^{-1/2} R D^{-1/2} entries on the same pattern.
struct ResidueMatrix {
  int dim = 0;
  double lambda = 0.0;
  ScalingDiagonal scaling;
  SparseSymmetricMatrix entries;     // zero diagonal
  SparseSymmetricMatrix normalized;  // zero diagonal, same pattern
  double max_abs_normalized = 0.0;   // alpha = ||normalized||_max
};

// Pre: lambda >= 0, positive diagonal. Entries with |sigma_ij| == lambda are
// excluded (strict inequality keeps support).
ResidueMatrix residue(const CovarianceInput& c, double lambda);

// ---------------------------------------------------------------------------
// Magnitude ladder and lambda selection
// ---------------------------------------------------------------------------

// Distinct off-diagonal magnitudes sorted descending: sigma_1 > sigma_2 > ...
// `multiplicity[r]` counts entries at magnitude `values[r]`. Zero magnitudes
// are not listed.
struct MagnitudeLadder {
  std::vector<double> values;
  std::vector<int> multiplicity;
  int num_offdiag_nonzero = 0;  // total |{(i,j): i<j, sigma_ij != 0}|
  int size() const { return static_cast<int>(values.size()); }
};

MagnitudeLadder magnitude_ladder(const CovarianceInput& c);

// lambda with exactly k surviving off-diagonal (unordered) pairs: any value in
// the open interval (sigma_{k+1}, sigma_k) of the ladder *counted with
// multiplicity*; returns the midpoint. k = 0 returns 1.01 * sigma_1 (all
// entries killed). Throws TieAtBoundaryError when a magnitude tie makes
// exactly-k unattainable, and std::out_of_range when k exceeds the number of
// nonzero off-diagonal pairs.
double lambda_for_k(const CovarianceInput& c, int k);

// Keep the k largest-magnitude off-diagonal entries (as entries of sigma, not
// residues). Ties across the k-th magnitude throw TieAtBoundaryError.
SparseSymmetricMatrix hard_threshold_topk(const CovarianceInput& c, int k);

// ---------------------------------------------------------------------------
// Sample covariance
// ---------------------------------------------------------------------------

// Maximum-likelihood normalization (1/n) by default; `unbiased` selects
// 1/(n-1). Rows are centered by the sample mean first.
CovarianceInput sample_covariance(const SampleSet& s, bool unbiased = false);

}  // namespace glx
