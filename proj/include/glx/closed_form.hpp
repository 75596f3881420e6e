#pragma once

// Closed-form estimation on the residue support: the explicit inverse formula
// on acyclic components, sufficient-condition checks, the per-instance
// epsilon certificate for cyclic supports, and the tree complement/inverse
// pair used both by the estimator and as an independent cross-check target.

#include "glx/covariance.hpp"
#include "glx/graph.hpp"
#include "glx/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace glx {

// ---------------------------------------------------------------------------
// Solutions
// ---------------------------------------------------------------------------

enum class SolutionMethod { closed_exact, closed_approx, numerical, warm_started };

const char* to_string(SolutionMethod m);

struct GlSolution {
  SparseSymmetricMatrix estimate;
  double lambda = 0.0;
  SolutionMethod method = SolutionMethod::closed_approx;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  int sweeps = 0;  // numerical solver block sweeps (0 for closed forms)
  // Primal objective minus the dual value of the working covariance;
  // diagnostic only, NaN unless the numerical solver produced the estimate.
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
};

// ---------------------------------------------------------------------------
// Condition checks
// ---------------------------------------------------------------------------

struct ComponentConditionRecord {
  int id = 0;
  int size = 0;
  bool acyclic = false;
  // Positive definiteness of I + normalized residue restricted to the
  // component. Under PdScope::exactness_screen a cyclic component is never
  // factorized (the acyclicity clause has already disqualified it from the
  // exact formula) and the record keeps pd = false.
  bool pd = false;
  bool gap_ok = false;   // alpha_C^2 <= min over excluded pairs inside C
  double gap_lhs = 0.0;  // alpha_C^2
  double gap_rhs = std::numeric_limits<double>::infinity();
  bool exact() const { return acyclic && pd && gap_ok; }
};

struct ConditionReport {
  double lambda = 0.0;
  double alpha = 0.0;  // global max |normalized residue entry|

  // Global clauses. The acyclic route and the certified-approximate route
  // share the PD clause; the two gap right-hand sides are minimized over the
  // thresholded pair set and the off-support pair set respectively (equal
  // sets by construction, reported separately). The support graph splits
  // I + normalized residue into independent diagonal blocks, so the global
  // pd flag is the conjunction of the per-component flags; under
  // PdScope::exactness_screen it therefore covers only the components the
  // screen factorizes (see PdScope below).
  bool acyclic = false;
  bool pd = false;
  bool gap_ok = false;
  double gap_lhs = 0.0;
  double gap_rhs_thresholded = std::numeric_limits<double>::infinity();
  double gap_rhs_offsupport = std::numeric_limits<double>::infinity();
  bool gap_ok_offsupport = false;

  // Scale-invariant sufficient statistic for the gap clause at the ladder
  // interval holding lambda (exact for the midpoint choice
  // lambda = (s_k + s_{k+1})/2, a diagnostic elsewhere in the interval):
  //   ((2*s1 - s_k - s_{k+1})/S_max)^2 / ((s_k - s_{k+1})/S_max) <= 2/r^2
  // with S_max/S_min the extreme diagonal entries and r = S_max/S_min.
  // Defined only when lambda lies strictly inside an interval with k >= 1
  // and a successor magnitude (an exact-zero pair counts as magnitude 0).
  bool suff_stat_defined = false;
  double suff_stat_lhs = 0.0;
  double suff_stat_rhs = 0.0;
  bool suff_stat_ok = false;

  std::vector<ComponentConditionRecord> components;

  bool all_exact() const { return acyclic && pd && gap_ok; }
};

struct ConditionsFailedError : std::runtime_error {
  explicit ConditionsFailedError(ConditionReport r)
      : std::runtime_error("closed-form sufficient conditions failed"),
        report(std::move(r)) {}
  ConditionReport report;
};

// Scope of the positive-definiteness clause in a condition report.
//
//   certificate      Factorize I + normalized residue on every component.
//                    The global pd flag answers the certified-approximation
//                    precondition, and every component record is an honest
//                    PD verdict. This is the default and what the check /
//                    certify layer consumes.
//
//   exactness_screen Consult the factorization only after a component passes
//                    the acyclicity clause, where the sparse Cholesky runs in
//                    time linear in the component size (fill-free on forests).
//                    A cyclic component is already disqualified from the
//                    exact formula before its factorization would run, so its
//                    record keeps pd = false without paying for one. Exactness
//                    verdicts (exact(), all_exact()) are identical under both
//                    scopes; only the pd flags of cyclic components differ.
//                    This is the screen the closed-form solution pipeline
//                    runs, and it keeps the end-to-end cost quadratic in the
//                    dimension even when the support contains large cyclic
//                    components whose factorization would not be.
enum class PdScope { certificate, exactness_screen };

// The excluded-pair gap right-hand sides need the original sigma entries that
// thresholding discards, so the check takes the covariance, not the residue.
ConditionReport check_conditions(const CovarianceInput& c, double lambda,
                                 PdScope scope = PdScope::certificate);

// Positive definiteness of D + T(lambda) for a candidate solution's sign
// pattern s: T_ij = sigma_ij + lambda * sign(s_ij) on supp(s), zero
// elsewhere, D = diag(sigma). Post-hoc verifier for a proposed support;
// never used by the estimator.
bool dt_positive_definite_check(const SparseSymmetricMatrix& s,
                                const CovarianceInput& c, double lambda);

// ---------------------------------------------------------------------------
// Closed-form estimates
// ---------------------------------------------------------------------------

// The explicit formula on the residue support (exact on acyclic components
// when the conditions hold, certified-approximate otherwise):
//   A_ii = (1/sigma_ii) * (1 + sum_{(i,m) in E} r_im^2 / (sigma_ii*sigma_mm - r_im^2))
//   A_ij = -r_ij / (sigma_ii*sigma_jj - r_ij^2)      on the support
// with r the residue entries. Throws DegenerateEntryError when a normalized
// residue entry reaches magnitude 1.
GlSolution approx_solution(const ResidueMatrix& res);

// Same formula, gated: checks the acyclicity, PD, and gap conditions globally
// and throws ConditionsFailedError carrying the full report when any fails.
GlSolution exact_solution(const CovarianceInput& c, double lambda);

// ---------------------------------------------------------------------------
// Tree complement / inverse (unit-diagonal world)
// ---------------------------------------------------------------------------

struct NotAcyclicError : std::runtime_error {
  NotAcyclicError() : std::runtime_error("support graph contains a cycle") {}
};

// For unit-diagonal m with acyclic support graph g == supp(m):
// N_ij = product of m-entries along the unique path between i and j for
// non-adjacent pairs inside a component; 0 on the support, the diagonal,
// and across components. Verifies (m + N) PD and supp((m+N)^{-1}) inside g.
SymmetricMatrix tree_complement(const SymmetricMatrix& m,
                                const SupportGraph& g);

// A = (m + tree_complement(m))^{-1} by the explicit entrywise formula:
//   A_ii = 1 + sum_{j ~ i} m_ij^2 / (1 - m_ij^2),  A_ij = -m_ij / (1 - m_ij^2).
// Verified against the complement route to 1e-10.
SparseSymmetricMatrix tree_inverse(const SymmetricMatrix& m,
                                   const SupportGraph& g);

// ---------------------------------------------------------------------------
// Path-sum relaxed inverse (cyclic supports)
// ---------------------------------------------------------------------------

// R_ij = sum over all simple paths between i and j of the product of
// normalized residue entries along the path; R_ii = 1; 0 across components.
// Subject to the same enumeration cap as max_simple_paths.
SymmetricMatrix path_sum_matrix(const ResidueMatrix& res,
                                std::int64_t cap = kDefaultPathCap);

// B = D^{1/2} R D^{1/2} with the diagonal written exactly as sigma_ii.
// The candidate inverse handed to the relaxed optimality check.
SymmetricMatrix relaxed_inverse_candidate(const ResidueMatrix& res,
                                          std::int64_t cap = kDefaultPathCap);

// ---------------------------------------------------------------------------
// Epsilon certificate
// ---------------------------------------------------------------------------

// Thrown by attach_perturbation_bound when the bound is undefined (the
// estimate is not positive definite, so 1/mu_min is meaningless).
struct CertificateUnavailableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EpsilonCertificate {
  double epsilon = 0.0;    // infinity when unbounded by this tool
  bool unbounded = false;  // path enumeration overflowed or alpha >= 1
  double alpha = 0.0;
  double delta = 1.0;
  int girth = 0;  // 0 = acyclic
  std::int64_t p_max = 0;
  int max_degree = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  // ||S - A||_max <= d_max(A) * (1/mu_min(A) + 1) * epsilon, with
  // mu_min(A) certified by bisection. NaN until attach_perturbation_bound.
  double mu_min_a = std::numeric_limits<double>::quiet_NaN();
  double mu_max_a = std::numeric_limits<double>::quiet_NaN();
  double perturbation_bound = std::numeric_limits<double>::quiet_NaN();
  // Optimality-gap bound; mu_max of the true optimum is *proxied* by
  // 1/sigma_min and the substitution is flagged here.
  double optgap_bound = std::numeric_limits<double>::quiet_NaN();
  bool optgap_uses_proxy = true;
};

// Certificate from the residue alone (graph statistics computed internally,
// subject to the path cap). Acyclic supports yield epsilon = 0 exactly.
EpsilonCertificate epsilon_certificate(const ResidueMatrix& res,
                                       std::int64_t cap = kDefaultPathCap);

// Extends `cert` with the perturbation and optimality-gap bounds for a
// concrete estimate a (needs its extreme eigenvalues). Throws
// CertificateUnavailableError when a is not positive definite; an unbounded
// epsilon simply propagates as infinite bounds.
void attach_perturbation_bound(EpsilonCertificate& cert,
                               const SparseSymmetricMatrix& a);

}  // namespace glx
