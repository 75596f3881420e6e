#pragma once

// Numerical graphical-lasso solver (covariance-side block coordinate descent
// with an inner coordinate-descent lasso), exact and relaxed optimality
// residuals, and the warm-started per-component pipeline.

#include "glx/closed_form.hpp"
#include "glx/covariance.hpp"
#include "glx/numerics.hpp"

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace glx {

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

// f(S) = -log det S + <sigma, S> + lambda * sum_{i != j} |S_ij|. Pre: S PD.
double gl_objective(const CovarianceInput& c, const SparseSymmetricMatrix& s,
                    double lambda);
double gl_objective(const CovarianceInput& c, const SymmetricMatrix& s,
                    double lambda);

// ---------------------------------------------------------------------------
// Optimality residuals
// ---------------------------------------------------------------------------

enum class KktClause { diagonal, support, off_support };

struct KktReport {
  double residual = 0.0;  // max violation over all clauses
  KktClause worst_clause = KktClause::diagonal;
  int worst_i = 0, worst_j = 0;
  double diag_violation = 0.0;
  double support_violation = 0.0;
  double offsupport_violation = 0.0;
};

// Stationarity of s for the objective at (c, lambda), measured on W = s^{-1}:
//   diagonal:     |W_ii - sigma_ii|
//   support:      |W_ij - sigma_ij - lambda * sign(s_ij)|   (s_ij != 0)
//   off-support:  max(0, |W_ij - sigma_ij| - lambda)        (s_ij == 0)
// Pre: s PD (throws NotPositiveDefiniteError otherwise).
KktReport exact_kkt_residual(const CovarianceInput& c,
                             const SparseSymmetricMatrix& s, double lambda);

struct RelaxedKktReport {
  bool ok = false;
  double epsilon = 0.0;
  double inverse_violation = 0.0;     // ||a b - I||_max
  double diag_violation = 0.0;        // max |b_ii - sigma_ii| (must be 0)
  double support_violation = 0.0;     // max |b_ij - sigma_ij - lambda sign(a_ij)|
  double offsupport_excess = 0.0;     // max(0, |b_ij - sigma_ij| - lambda)
  double measured = 0.0;              // max of the four
};

// The epsilon-relaxed conditions for the pair (a, b): b plays the approximate
// inverse of a. ok iff every clause holds within epsilon (the diagonal clause
// exactly, the off-support clause within lambda + epsilon).
RelaxedKktReport relaxed_kkt_check(const CovarianceInput& c,
                                   const SparseSymmetricMatrix& a,
                                   const SymmetricMatrix& b, double lambda,
                                   double epsilon);

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

struct SolverConfig {
  double tol = 1e-7;      // exact-KKT residual target
  int max_iter = 10000;   // full block sweeps
  std::optional<SparseSymmetricMatrix> init;  // PD warm start for S
  int threads = 1;        // used by the per-component pipeline
};

struct SolverNonConvergenceError : std::runtime_error {
  SolverNonConvergenceError(GlSolution best_iterate, std::string why)
      : std::runtime_error(std::move(why)), best(std::move(best_iterate)) {}
  GlSolution best;
};

// Covariance-side block coordinate descent. Entries of the estimate that the
// inner lasso zeroes are structural zeros; |entry| <= 10 * tol is the
// numerical-zero cutoff applied when the support is reported. Convergence is
// declared on exact_kkt_residual <= tol (duality gap tracked as diagnostic).
// lambda = 0 requires PD input and short-circuits to the plain inverse.
GlSolution glasso_solve(const CovarianceInput& c, double lambda,
                        const SolverConfig& cfg = {});

// ---------------------------------------------------------------------------
// Warm-started per-component pipeline
// ---------------------------------------------------------------------------

struct ComponentSolve {
  int id = 0;
  int size = 0;
  SolutionMethod method = SolutionMethod::closed_exact;
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  int sweeps = 0;  // 0 for closed-form components
};

struct WarmStartResult {
  GlSolution solution;
  std::vector<ComponentSolve> components;
  ConditionReport conditions;
};

// Decomposes the residue support, applies the closed form on components whose
// per-component conditions all hold, and runs the numerical solver restricted
// to each remaining component's principal submatrix, initialized at the
// closed-form candidate when it is PD. Per-component failures propagate;
// partial results are never returned silently.
WarmStartResult warm_start_solve(const CovarianceInput& c, double lambda,
                                 const SolverConfig& cfg = {});

// Support of s after applying a zero cutoff (|entry| <= cutoff dropped).
SupportGraph support_with_cutoff(const SparseSymmetricMatrix& s,
                                 double cutoff);

}  // namespace glx
