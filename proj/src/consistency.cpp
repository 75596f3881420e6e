#include "glx/consistency.hpp"

#include "glx/closed_form.hpp"
#include "glx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace glx {

namespace {

using Pair = std::pair<int, int>;

std::vector<Pair> free_pairs(const SymmetricMatrix& m) {
  std::vector<Pair> f;
  const int d = m.dim();
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i)
      if (m(i, j) == 0.0) f.emplace_back(i, j);
  return f;
}

void require_unit_diagonal(const SymmetricMatrix& m, const char* who) {
  for (int i = 0; i < m.dim(); ++i)
    if (m(i, i) != 1.0)
      throw std::invalid_argument(std::string(who) +
                                  ": diagonal must be exactly 1");
}

bool dense_pd(const Eigen::MatrixXd& w) {
  return is_positive_definite(SymmetricMatrix::from_dense(w));
}

// One coordinate-ascent pass over the free entries of W, updating the
// maintained inverse V by rank-two corrections. For the free entry (i, j)
// with a = V_ii, b = V_ij, c = V_jj the determinant-maximizing step is
// t = b / (ac - b^2); the inverse correction is V -= [g_i g_j] K [g_i g_j]^T
// with K = [[-b^2/(a*denom), t], [t, -b^2/(c*denom)]] (the 1/t terms of the
// textbook rank-two formula cancel, so b -> 0 is harmless).
void ascent_sweep(Eigen::MatrixXd& w, Eigen::MatrixXd& v,
                  const std::vector<Pair>& free) {
  for (const auto& [i, j] : free) {
    const double a = v(i, i), b = v(i, j), c = v(j, j);
    if (b == 0.0) continue;
    const double denom = a * c - b * b;
    if (!(denom > 0.0) || !(a > 0.0) || !(c > 0.0))
      throw std::runtime_error(
          "max_det_completion: maintained inverse lost positive definiteness");
    const double t = b / denom;
    const double k11 = -b * b / (a * denom);
    const double k22 = -b * b / (c * denom);
    const Eigen::VectorXd gi = v.col(i);
    const Eigen::VectorXd gj = v.col(j);
    v.noalias() -= k11 * gi * gi.transpose();
    v.noalias() -= k22 * gj * gj.transpose();
    const Eigen::MatrixXd cross = gi * gj.transpose();
    v.noalias() -= t * cross;
    v.noalias() -= t * cross.transpose();
    w(i, j) += t;
    w(j, i) += t;
  }
}

double max_abs_over(const Eigen::MatrixXd& v, const std::vector<Pair>& free) {
  double r = 0.0;
  for (const auto& [i, j] : free) r = std::max(r, std::abs(v(i, j)));
  return r;
}

}  // namespace

CompletionResult max_det_completion(const SymmetricMatrix& m, double tol,
                                    int max_iter,
                                    const std::optional<SymmetricMatrix>& start) {
  const int d = m.dim();
  require_unit_diagonal(m, "max_det_completion");
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i)
      if (std::abs(m(i, j)) >= 1.0) throw NoPdCompletionError();

  const std::vector<Pair> free = free_pairs(m);
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(d, d);
  if (start) {
    if (start->dim() != d)
      throw DimensionMismatchError("max_det_completion: start dimension");
    for (int j = 0; j < d; ++j)
      for (int i = j; i < d; ++i)
        if ((i == j || m(i, j) != 0.0) && (*start)(i, j) != 0.0)
          throw std::invalid_argument(
              "max_det_completion: start must vanish on the diagonal and on "
              "the specified entries");
    n = start->dense();
  }

  const Eigen::MatrixXd fixed = m.dense() - Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);

  // Reach a PD starting point: scale both the fixed part and the seed down
  // until PD (always succeeds near 0), then walk rho back to 1, reusing each
  // stage's complement as the next stage's seed.
  double rho = 1.0;
  if (!dense_pd(eye + fixed + n)) {
    double s = 0.5;
    while (s > 1e-8 && !dense_pd(eye + s * (fixed + n))) s *= 0.5;
    if (s <= 1e-8) throw NoPdCompletionError();
    rho = s;
    n *= s;
  }

  CompletionResult result;
  result.iterations = 0;
  int budget = max_iter;
  Eigen::MatrixXd w, v;
  for (;;) {
    w = eye + rho * fixed + n;
    v = inverse(SymmetricMatrix::from_dense(w)).dense();
    double residual = max_abs_over(v, free);
    while (residual > tol && budget > 0) {
      ascent_sweep(w, v, free);
      ++result.iterations;
      --budget;
      // Refresh the inverse once per sweep: rank-two drift control and the
      // honest convergence measurement.
      v = inverse(SymmetricMatrix::from_dense(w)).dense();
      residual = max_abs_over(v, free);
    }
    if (rho == 1.0) {
      result.converged = residual <= tol;
      result.residual = residual;
      break;
    }
    if (budget <= 0) {
      result.converged = false;
      result.residual = residual;
      break;
    }
    // Extract this stage's complement and advance rho as far as PD allows.
    for (const auto& [i, j] : free) {
      n(i, j) = w(i, j);
      n(j, i) = w(j, i);
    }
    double next = 1.0;
    while (!dense_pd(eye + next * fixed + n)) {
      next = rho + 0.5 * (next - rho);
      if (next - rho < 1e-6 * std::max(1.0, rho)) throw NoPdCompletionError();
    }
    rho = next;
  }

  result.complement = SymmetricMatrix(d);
  for (const auto& [i, j] : free) result.complement.set(i, j, w(i, j));
  result.completed =
      SymmetricMatrix::from_dense(m.dense() + result.complement.dense());
  return result;
}

bool has_pd_completion(const SymmetricMatrix& m) {
  require_unit_diagonal(m, "has_pd_completion");
  for (int j = 0; j < m.dim(); ++j)
    for (int i = j + 1; i < m.dim(); ++i)
      if (std::abs(m(i, j)) >= 1.0) return false;
  if (is_positive_definite(m)) return true;
  try {
    return max_det_completion(m).converged;
  } catch (const NoPdCompletionError&) {
    return false;
  }
}

bool is_inverse_consistent(const SymmetricMatrix& m, double zero_cutoff) {
  try {
    CompletionResult r = max_det_completion(m);
    return r.converged && r.residual <= zero_cutoff;
  } catch (const NoPdCompletionError&) {
    return false;
  }
}

bool is_sign_consistent(const SymmetricMatrix& m, double zero_cutoff) {
  CompletionResult r;
  try {
    r = max_det_completion(m);
  } catch (const NoPdCompletionError&) {
    return false;
  }
  if (!r.converged || r.residual > zero_cutoff) return false;
  const Eigen::MatrixXd v = inverse(r.completed).dense();
  const int d = m.dim();
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      if (m(i, j) == 0.0) continue;
      if (std::abs(v(i, j)) <= zero_cutoff) continue;  // boundary zero
      if ((v(i, j) > 0.0) == (m(i, j) > 0.0)) return false;
    }
  return true;
}

BetaEstimate beta_empirical(const SupportGraph& g, double alpha, int trials,
                            std::uint64_t seed) {
  BetaEstimate est;
  est.trials_attempted = trials;
  if (is_acyclic(g)) {
    bool distance_two = false;
    for (const auto& nbrs : g.adj)
      if (nbrs.size() >= 2) distance_two = true;
    est.exact = distance_two ? alpha * alpha : 0.0;
  }
  const int d = g.num_vertices;
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(t));
    SymmetricMatrix m = SymmetricMatrix::identity(d);
    const bool forced = (t % 4 == 0);  // extremal-magnitude trials
    for (int i = 0; i < d; ++i)
      for (int v : g.adj[i]) {
        if (v <= i) continue;
        // (0, 1] draw keeps the edge present; 0 would change the graph.
        const double mag = forced ? alpha : alpha * (1.0 - rng.uniform01());
        m.set(i, v, rng.sign() * mag);
      }
    if (alpha >= 1.0) continue;  // magnitude-1 entries are never completable
    try {
      CompletionResult r = max_det_completion(m);
      if (!r.converged) continue;
      ++est.trials_used;
      est.empirical_max =
          std::max(est.empirical_max, max_abs_offdiag(r.complement));
    } catch (const NoPdCompletionError&) {
    }
  }
  return est;
}

CompletionConditionCheck verify_support_conditions(const CovarianceInput& c,
                                                   double lambda) {
  CompletionConditionCheck check;
  const int d = c.dim();
  ResidueMatrix res = residue(c, lambda);

  // Gap right-hand side over the pairs excluded by thresholding.
  const auto& a = c.sigma.dense();
  const auto& sd = res.scaling.sqrt_d;
  double rhs = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i)
      if (std::abs(a(i, j)) <= lambda)
        rhs = std::min(rhs, (lambda - std::abs(a(i, j))) / (sd[i] * sd[j]));
  check.gap_rhs = rhs;

  SymmetricMatrix m = res.normalized.to_symmetric();
  for (int i = 0; i < d; ++i) m.set(i, i, 1.0);

  CompletionResult r;
  try {
    r = max_det_completion(m);
  } catch (const NoPdCompletionError&) {
    return check;  // nothing else is defined without a completion
  }
  if (!r.converged || r.residual > 1e-8) return check;
  check.pd_completable = true;
  check.complement_max = max_abs_offdiag(r.complement);
  // The graph-level worst case is only ever used to bound this instance's
  // own complement, so the instance's ||N||_max is the sound substitute.
  check.gap_ok = check.complement_max <= check.gap_rhs;

  const Eigen::MatrixXd v = inverse(r.completed).dense();
  check.sign_consistent = true;
  for (const auto& e : res.normalized.offdiag()) {
    if (std::abs(v(e.i, e.j)) <= 1e-8) continue;
    if ((v(e.i, e.j) > 0.0) == (e.value > 0.0)) {
      check.sign_consistent = false;
      break;
    }
  }
  return check;
}

}  // namespace glx
