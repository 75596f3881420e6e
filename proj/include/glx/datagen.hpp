#pragma once

// Synthetic instance generators: sparse sign precision matrices with their
// exact covariances, Gaussian sampling, and the spanning-tree / single-cycle
// covariance families with their admissible threshold intervals.

#include "glx/covariance.hpp"
#include "glx/numerics.hpp"

#include <cstdint>

namespace glx {

struct SyntheticInstance {
  // Ground-truth precision; empty (dim 0) for the covariance-only families.
  SparseSymmetricMatrix precision;
  CovarianceInput covariance;
  // Admissible threshold interval (lo, hi) and the recommended value inside
  // it; lo = hi = lambda when the family fixes a single value.
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

// Precision U U^T + 2 I with U a d x d {-1, 0, +1} matrix; the number of
// nonzero off-diagonal precision entries is calibrated to `target_nnz`
// (unordered pairs) within +-15% by a closed-form collision estimate plus one
// corrective resample. Covariance is the exact inverse. The recommended
// lambda interval is left empty (caller thresholds by k).
SyntheticInstance random_precision(int d, std::int64_t target_nnz,
                                   std::uint64_t seed);

// n zero-mean Gaussian rows with covariance c.sigma (must be PD).
SampleSet sample_gaussian(const CovarianceInput& c, int n, std::uint64_t seed);

// Unit diagonal; a uniform random spanning tree carries entries of magnitude
// in [0.85, 0.95] with random signs; every off-tree entry is uniform in
// [-(0.85 - omega), 0.85 - omega]. Requires omega > 0.01 so the tree and
// off-tree magnitude ranges are separated; ties broken by construction
// (distinct magnitudes enforced with 1e-9-scale jitter). The lambda interval
// is (largest off-tree magnitude, smallest tree magnitude); recommended value
// is its midpoint. Thresholding anywhere inside keeps exactly the tree.
SyntheticInstance spanning_tree_covariance(int d, double omega,
                                           std::uint64_t seed);

// Unit diagonal; the d-cycle 1-2-...-d-1 carries entries of magnitude 0.8
// with random signs; chord entries are uniform in [-0.7, 0.7]. Recommended
// lambda = 0.75 (interval (0.7, 0.8)); the residue support there is exactly
// the cycle with entries of magnitude 0.05.
SyntheticInstance cycle_covariance(int d, std::uint64_t seed);

}  // namespace glx
