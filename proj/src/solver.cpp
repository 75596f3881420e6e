#include "glx/solver.hpp"

#include "glx/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace glx {

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

double gl_objective(const CovarianceInput& c, const SparseSymmetricMatrix& s,
                    double lambda) {
  if (s.dim() != c.dim())
    throw DimensionMismatchError("gl_objective: dimension mismatch");
  const auto& sig = c.sigma.dense();
  double trace = sig.diagonal().dot(s.diagonal());
  double l1 = 0.0;
  for (const auto& e : s.offdiag()) {
    trace += 2.0 * sig(e.i, e.j) * e.value;
    l1 += 2.0 * std::abs(e.value);
  }
  return -log_det(s.to_symmetric()) + trace + lambda * l1;
}

double gl_objective(const CovarianceInput& c, const SymmetricMatrix& s,
                    double lambda) {
  if (s.dim() != c.dim())
    throw DimensionMismatchError("gl_objective: dimension mismatch");
  const auto& sig = c.sigma.dense();
  const auto& m = s.dense();
  const double trace = (sig.array() * m.array()).sum();
  const double l1 = m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
  return -log_det(s) + trace + lambda * l1;
}

// ---------------------------------------------------------------------------
// Optimality residuals
// ---------------------------------------------------------------------------

KktReport exact_kkt_residual(const CovarianceInput& c,
                             const SparseSymmetricMatrix& s, double lambda) {
  const int d = c.dim();
  if (s.dim() != d)
    throw DimensionMismatchError("exact_kkt_residual: dimension mismatch");
  const Eigen::MatrixXd w = inverse(s.to_symmetric()).dense();
  const auto& sig = c.sigma.dense();

  KktReport rep;
  auto consider = [&rep](KktClause clause, int i, int j, double v) {
    double* slot = clause == KktClause::diagonal ? &rep.diag_violation
                   : clause == KktClause::support ? &rep.support_violation
                                                  : &rep.offsupport_violation;
    *slot = std::max(*slot, v);
    if (v > rep.residual) {
      rep.residual = v;
      rep.worst_clause = clause;
      rep.worst_i = i;
      rep.worst_j = j;
    }
  };

  for (int i = 0; i < d; ++i)
    consider(KktClause::diagonal, i, i, std::abs(w(i, i) - sig(i, i)));

  // Single merge pass: stored entries are sorted by (j, i).
  const auto& off = s.offdiag();
  std::size_t p = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      double v = 0.0;
      if (p < off.size() && off[p].j == j && off[p].i == i) v = off[p++].value;
      if (v != 0.0) {
        const double sgn = v > 0.0 ? 1.0 : -1.0;
        consider(KktClause::support, i, j,
                 std::abs(w(i, j) - sig(i, j) - lambda * sgn));
      } else {
        consider(KktClause::off_support, i, j,
                 std::max(0.0, std::abs(w(i, j) - sig(i, j)) - lambda));
      }
    }
  return rep;
}

RelaxedKktReport relaxed_kkt_check(const CovarianceInput& c,
                                   const SparseSymmetricMatrix& a,
                                   const SymmetricMatrix& b, double lambda,
                                   double epsilon) {
  const int d = c.dim();
  if (a.dim() != d || b.dim() != d)
    throw DimensionMismatchError("relaxed_kkt_check: dimension mismatch");
  const auto& sig = c.sigma.dense();
  const auto& bd = b.dense();

  RelaxedKktReport rep;
  rep.epsilon = epsilon;

  // ||a b - I||_max via sparse-row times dense accumulation.
  Eigen::MatrixXd prod = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) prod.row(i) = a.diagonal()[i] * bd.row(i);
  for (const auto& e : a.offdiag()) {
    prod.row(e.i) += e.value * bd.row(e.j);
    prod.row(e.j) += e.value * bd.row(e.i);
  }
  prod -= Eigen::MatrixXd::Identity(d, d);
  rep.inverse_violation = prod.cwiseAbs().maxCoeff();

  for (int i = 0; i < d; ++i)
    rep.diag_violation =
        std::max(rep.diag_violation, std::abs(bd(i, i) - sig(i, i)));

  const auto& off = a.offdiag();
  std::size_t p = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      double v = 0.0;
      if (p < off.size() && off[p].j == j && off[p].i == i) v = off[p++].value;
      if (v != 0.0) {
        const double sgn = v > 0.0 ? 1.0 : -1.0;
        rep.support_violation =
            std::max(rep.support_violation,
                     std::abs(bd(i, j) - sig(i, j) - lambda * sgn));
      } else {
        rep.offsupport_excess =
            std::max(rep.offsupport_excess,
                     std::max(0.0, std::abs(bd(i, j) - sig(i, j)) - lambda));
      }
    }

  rep.measured = std::max({rep.inverse_violation, rep.diag_violation,
                           rep.support_violation, rep.offsupport_excess});
  rep.ok = rep.inverse_violation <= epsilon && rep.diag_violation == 0.0 &&
           rep.support_violation <= epsilon && rep.offsupport_excess <= epsilon;
  return rep;
}

// ---------------------------------------------------------------------------
// Numerical solver
// ---------------------------------------------------------------------------

namespace {

inline double soft(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

// Recover the precision estimate from the working covariance and the last
// per-column lasso coefficients; entries both columns agree are zero stay
// exactly zero, the rest are averaged.
Eigen::MatrixXd recover_precision(const Eigen::MatrixXd& w,
                                  const Eigen::MatrixXd& b,
                                  const Eigen::VectorXd& sigma_diag) {
  const int d = static_cast<int>(w.rows());
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    double dot = 0.0;
    for (int k = 0; k < d; ++k)
      if (k != j) dot += w(k, j) * b(k, j);
    const double denom = sigma_diag[j] - dot;
    if (!(denom > 0.0))
      throw SolverNonConvergenceError(
          GlSolution{}, "glasso: Schur complement lost positivity during "
                        "precision recovery");
    const double t22 = 1.0 / denom;
    theta(j, j) = t22;
    for (int k = 0; k < d; ++k)
      if (k != j && b(k, j) != 0.0) theta(k, j) = -b(k, j) * t22;
  }
  Eigen::MatrixXd sym(d, d);
  for (int j = 0; j < d; ++j) {
    sym(j, j) = theta(j, j);
    for (int i = j + 1; i < d; ++i) {
      if (theta(i, j) == 0.0 && theta(j, i) == 0.0) {
        sym(i, j) = sym(j, i) = 0.0;
      } else {
        sym(i, j) = sym(j, i) = 0.5 * (theta(i, j) + theta(j, i));
      }
    }
  }
  return sym;
}

}  // namespace

GlSolution glasso_solve(const CovarianceInput& c, double lambda,
                        const SolverConfig& cfg) {
  const int d = c.dim();
  if (lambda < 0.0) throw std::invalid_argument("glasso: lambda must be >= 0");
  const Eigen::MatrixXd& sig = c.sigma.dense();

  if (lambda == 0.0) {
    // Unpenalized maximum likelihood: the plain inverse (throws when the
    // input is not PD, in which case the problem is unbounded below).
    SymmetricMatrix inv = inverse(c.sigma);
    GlSolution sol;
    sol.estimate = SparseSymmetricMatrix::from_dense(inv.dense());
    sol.lambda = 0.0;
    sol.method = SolutionMethod::numerical;
    sol.objective = gl_objective(c, inv, 0.0);
    sol.kkt_residual = exact_kkt_residual(c, sol.estimate, 0.0).residual;
    sol.duality_gap = 0.0;
    return sol;
  }

  // Feasible PD starting covariance.
  Eigen::MatrixXd w;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  bool have_start = false;
  if (cfg.init) {
    const SymmetricMatrix s0 = cfg.init->to_symmetric();
    Eigen::MatrixXd w0 = inverse(s0).dense();  // throws if init is not PD
    // The diagonal is unpenalized, so every dual iterate keeps
    // w_jj = sigma_jj; pin the warm start to that slice up front.
    w0.diagonal() = sig.diagonal();
    if (is_positive_definite(SymmetricMatrix::from_dense(w0))) {
      w = std::move(w0);
      have_start = true;
    }
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i)
        if (i != j) b(i, j) = -s0(i, j) / s0(j, j);
  }
  if (!have_start) {
    ResidueMatrix res = residue(c, lambda);
    w = res.entries.to_dense();
    w.diagonal() = sig.diagonal();
    if (!is_positive_definite(SymmetricMatrix::from_dense(w))) {
      bool found = false;
      if (is_positive_definite(c.sigma)) {
        w = sig;
        found = true;
      }
      for (double gamma : {0.9, 0.75, 0.5, 0.25, 0.1}) {
        if (found) break;
        Eigen::MatrixXd cand =
            gamma * sig + (1.0 - gamma) * (res.entries.to_dense());
        cand.diagonal() = sig.diagonal();
        if (is_positive_definite(SymmetricMatrix::from_dense(cand))) {
          w = cand;
          found = true;
        }
      }
      if (!found)
        throw SolverNonConvergenceError(
            GlSolution{},
            "glasso: no positive definite feasible start found (thresholded "
            "covariance, input covariance, and blends all indefinite)");
    }
  }

  const double inner_thr = 0.2 * cfg.tol;
  const int max_passes = 500;
  Eigen::VectorXd u(d), beta(d);

  GlSolution best;
  double best_kkt = std::numeric_limits<double>::infinity();
  int sweeps = 0;

  while (sweeps < cfg.max_iter) {
    ++sweeps;
    for (int j = 0; j < d; ++j) {
      beta = b.col(j);
      beta[j] = 0.0;
      u.setZero();
      for (int k = 0; k < d; ++k)
        if (beta[k] != 0.0) u += beta[k] * w.col(k);
      for (int pass = 0; pass < max_passes; ++pass) {
        for (int k = 0; k < d; ++k) {
          if (k == j) continue;
          const double wkk = w(k, k);
          const double z = sig(k, j) - u[k] + wkk * beta[k];
          const double bnew = soft(z, lambda) / wkk;
          if (bnew != beta[k]) {
            u += (bnew - beta[k]) * w.col(k);
            beta[k] = bnew;
          }
        }
        double viol = 0.0;
        for (int k = 0; k < d; ++k) {
          if (k == j) continue;
          const double g = u[k] - sig(k, j);
          if (beta[k] != 0.0)
            viol = std::max(viol,
                            std::abs(g + lambda * (beta[k] > 0 ? 1.0 : -1.0)));
          else
            viol = std::max(viol, std::max(0.0, std::abs(g) - lambda));
        }
        if (viol <= inner_thr) break;
      }

      // Safeguard: the new column must keep the Schur complement positive.
      double dot = 0.0;
      for (int k = 0; k < d; ++k)
        if (k != j) dot += beta[k] * u[k];
      int damp = 0;
      while (sig(j, j) - dot <= 1e-12 * sig(j, j) && damp < 60) {
        beta *= 0.5;
        u *= 0.5;
        dot *= 0.25;
        ++damp;
      }
      if (sig(j, j) - dot <= 0.0)
        throw SolverNonConvergenceError(
            best, "glasso: Schur safeguard exhausted at column " +
                      std::to_string(j));

      for (int k = 0; k < d; ++k)
        if (k != j) w(k, j) = w(j, k) = u[k];
      b.col(j) = beta;
      b(j, j) = 0.0;
    }

    // Honest convergence gate: exact stationarity of the recovered estimate.
    Eigen::MatrixXd theta;
    try {
      theta = recover_precision(w, b, sig.diagonal());
    } catch (const SolverNonConvergenceError&) {
      continue;  // recovery not yet meaningful; keep sweeping
    }
    SparseSymmetricMatrix est = SparseSymmetricMatrix::from_dense(theta);
    double kkt = std::numeric_limits<double>::infinity();
    if (is_positive_definite(SymmetricMatrix::from_dense(theta)))
      kkt = exact_kkt_residual(c, est, lambda).residual;
    if (kkt < best_kkt) {
      best_kkt = kkt;
      best.estimate = est;
      best.lambda = lambda;
      best.method = SolutionMethod::numerical;
      best.kkt_residual = kkt;
      best.sweeps = sweeps;
    }
    if (kkt <= cfg.tol) {
      best.objective = gl_objective(c, est, lambda);
      int pivot = -1;
      auto wf = try_cholesky(SymmetricMatrix::from_dense(w), &pivot);
      best.duality_gap =
          wf ? best.objective - (wf->log_det() + d)
             : std::numeric_limits<double>::quiet_NaN();
      return best;
    }
  }
  throw SolverNonConvergenceError(
      best, "glasso: residual " + std::to_string(best_kkt) + " above tol " +
                std::to_string(cfg.tol) + " after " +
                std::to_string(cfg.max_iter) + " sweeps");
}

// ---------------------------------------------------------------------------
// Warm-started per-component pipeline
// ---------------------------------------------------------------------------

WarmStartResult warm_start_solve(const CovarianceInput& c, double lambda,
                                 const SolverConfig& cfg) {
  const int d = c.dim();
  WarmStartResult result;
  ResidueMatrix res = residue(c, lambda);
  result.conditions = check_conditions(c, lambda);

  SupportGraph g = support_graph(res.entries);
  ComponentDecomposition comps = decompose(g);

  // Residue entries bucketed by component, paired with their normalized
  // magnitudes (same pattern by construction).
  std::vector<std::vector<std::pair<OffDiagEntry, double>>> comp_entries(
      comps.num_components());
  {
    const auto& raw = res.entries.offdiag();
    const auto& nrm = res.normalized.offdiag();
    for (std::size_t k = 0; k < raw.size(); ++k)
      comp_entries[comps.component_of[raw[k].i]].emplace_back(
          raw[k], std::abs(nrm[k].value));
  }

  Eigen::MatrixXd estimate = Eigen::MatrixXd::Zero(d, d);
  const auto& sig = c.sigma.dense();

  bool all_closed = true;
  int total_sweeps = 0;
  for (int id = 0; id < comps.num_components(); ++id) {
    const auto& verts = comps.vertices[id];
    const auto& rec = result.conditions.components[id];
    const int nc = static_cast<int>(verts.size());
    ComponentSolve cs;
    cs.id = id;
    cs.size = nc;

    // Local closed-form candidate: exact answer when the component's
    // conditions hold, numerical warm start otherwise. Degenerate entries
    // (|normalized| >= 1, impossible in a PD component) void the candidate.
    bool degenerate = false;
    for (const auto& [e, mag] : comp_entries[id])
      if (mag >= 1.0) degenerate = true;
    Eigen::MatrixXd cand;
    if (!degenerate) {
      cand = Eigen::MatrixXd::Zero(d, d);
      for (int vtx : verts) cand(vtx, vtx) = 1.0 / sig(vtx, vtx);
      for (const auto& [e, mag] : comp_entries[id]) {
        const double denom = sig(e.i, e.i) * sig(e.j, e.j) - e.value * e.value;
        cand(e.i, e.j) = cand(e.j, e.i) = -e.value / denom;
        const double add = e.value * e.value / denom;
        cand(e.i, e.i) += add / sig(e.i, e.i);
        cand(e.j, e.j) += add / sig(e.j, e.j);
      }
    }

    if (rec.exact() && !degenerate) {
      cs.method = SolutionMethod::closed_exact;
      for (int x = 0; x < nc; ++x)
        for (int y = x; y < nc; ++y) {
          estimate(verts[x], verts[y]) = cand(verts[x], verts[y]);
          estimate(verts[y], verts[x]) = cand(verts[y], verts[x]);
        }
    } else {
      all_closed = false;
      cs.method = SolutionMethod::numerical;
      SymmetricMatrix sub(nc);
      SparseSymmetricMatrix sub_init(nc);
      for (int x = 0; x < nc; ++x) {
        sub.set(x, x, sig(verts[x], verts[x]));
        if (!degenerate) sub_init.mutable_diagonal()[x] = cand(verts[x], verts[x]);
        for (int y = x + 1; y < nc; ++y) {
          sub.set(y, x, sig(verts[y], verts[x]));
          if (!degenerate && cand(verts[y], verts[x]) != 0.0)
            sub_init.push_offdiag(y, x, cand(verts[y], verts[x]));
        }
      }
      sub_init.finalize();
      SolverConfig sub_cfg = cfg;
      sub_cfg.init.reset();
      if (!degenerate && is_positive_definite(sub_init.to_symmetric()))
        sub_cfg.init = std::move(sub_init);
      GlSolution sub_sol = glasso_solve(CovarianceInput(std::move(sub)),
                                        lambda, sub_cfg);
      cs.kkt_residual = sub_sol.kkt_residual;
      cs.sweeps = sub_sol.sweeps;
      total_sweeps += sub_sol.sweeps;
      const Eigen::MatrixXd sub_dense = sub_sol.estimate.to_dense();
      for (int x = 0; x < nc; ++x)
        for (int y = x; y < nc; ++y) {
          estimate(verts[x], verts[y]) = sub_dense(x, y);
          estimate(verts[y], verts[x]) = sub_dense(y, x);
        }
    }
    result.components.push_back(cs);
  }

  GlSolution& sol = result.solution;
  sol.estimate = SparseSymmetricMatrix::from_dense(estimate);
  sol.lambda = lambda;
  sol.method = all_closed ? SolutionMethod::closed_exact
                          : SolutionMethod::warm_started;
  sol.sweeps = total_sweeps;
  sol.objective = gl_objective(c, sol.estimate, lambda);
  sol.kkt_residual = exact_kkt_residual(c, sol.estimate, lambda).residual;
  return result;
}

SupportGraph support_with_cutoff(const SparseSymmetricMatrix& s,
                                 double cutoff) {
  return support_graph(s, cutoff);
}

}  // namespace glx
