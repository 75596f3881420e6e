#pragma once

// Maximum-determinant completions and the consistency toolkit: inverse- and
// sign-consistency of partially specified unit-diagonal matrices, empirical
// beta estimation, and PD-completability tests.

#include "glx/covariance.hpp"
#include "glx/graph.hpp"
#include "glx/numerics.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace glx {

struct NoPdCompletionError : std::runtime_error {
  NoPdCompletionError()
      : std::runtime_error(
            "no positive definite completion reachable (zero start and "
            "diagonal-shift backoff both failed)") {}
};

// ---------------------------------------------------------------------------
// Max-determinant completion
// ---------------------------------------------------------------------------

struct CompletionResult {
  SymmetricMatrix complement;  // N: zero diagonal, zero on supp(m)
  SymmetricMatrix completed;   // m + N
  int iterations = 0;          // full sweeps over free entries
  bool converged = false;
  double residual = 0.0;  // max |((m+N)^{-1})_ij| over free entries
};

// Maximizes det(m + N) over symmetric N supported on the complement of
// supp(m) (zero diagonal), by cyclic coordinate ascent with rank-two inverse
// updates; equivalently drives the inverse to zero on every free entry.
// Pre: unit-diagonal m, |off-diagonal| < 1. `start` optionally seeds N (must
// be zero on supp(m) and the diagonal). Matrices that are not PD at the seed
// are approached through a diagonal-shift homotopy; NoPdCompletionError when
// that backoff stalls. At max_iter the result is returned with
// converged == false.
CompletionResult max_det_completion(
    const SymmetricMatrix& m, double tol = 1e-10, int max_iter = 1000,
    const std::optional<SymmetricMatrix>& start = std::nullopt);

// True when a PD completion of m exists: m PD is the documented sufficient
// fast path; otherwise attempts the completion itself.
bool has_pd_completion(const SymmetricMatrix& m);

// ---------------------------------------------------------------------------
// Consistency predicates (Definitions of inverse- and sign-consistency)
// ---------------------------------------------------------------------------

// m is inverse-consistent iff some N with zeros on the diagonal and on
// supp(m) makes (m + N)^{-1} vanish outside supp(m) with m + N PD. Verified
// constructively through the completion; zero cutoff 1e-8.
bool is_inverse_consistent(const SymmetricMatrix& m, double zero_cutoff = 1e-8);

// Additionally requires sign((m+N)^{-1}_ij) == -sign(m_ij) on the support
// (entries below the cutoff on the support are accepted as boundary zeros).
bool is_sign_consistent(const SymmetricMatrix& m, double zero_cutoff = 1e-8);

// ---------------------------------------------------------------------------
// beta: worst-case complement magnitude over the alpha-box
// ---------------------------------------------------------------------------

struct BetaEstimate {
  double empirical_max = 0.0;      // max ||N||_max over sampled trials
  std::optional<double> exact;     // alpha^2 for acyclic graphs
  int trials_attempted = 0;
  int trials_used = 0;             // PD-completable samples
};

// Samples unit-diagonal matrices supported on g with off-diagonal magnitudes
// <= alpha (a quarter of the trials forced to magnitude exactly alpha with
// random signs, so the acyclic extremal case is attained), keeps those with a
// PD completion, and records the largest completion complement magnitude.
// For acyclic g the exact supremum alpha^2 is attached and no rejection is
// needed.
BetaEstimate beta_empirical(const SupportGraph& g, double alpha, int trials,
                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Instance-wise sufficient-condition verification via the completion toolkit
// ---------------------------------------------------------------------------

struct CompletionConditionCheck {
  bool pd_completable = false;
  bool sign_consistent = false;
  double complement_max = 0.0;  // ||N||_max of the actual completion
  double gap_rhs = 0.0;         // min over excluded pairs (lambda-|sigma_ij|)/sqrt(...)
  bool gap_ok = false;          // complement_max <= gap_rhs
  bool all_ok() const { return pd_completable && sign_consistent && gap_ok; }
};

// Verifies the support-recovery sufficient conditions for one instance by
// completing I + normalized residue: PD-completability, sign consistency,
// and the complement-vs-gap clause with the instance's own ||N||_max standing
// in for the graph-level worst case (sound: it is the only quantity the
// conclusion needs for this instance).
CompletionConditionCheck verify_support_conditions(const CovarianceInput& c,
                                                   double lambda);

}  // namespace glx
