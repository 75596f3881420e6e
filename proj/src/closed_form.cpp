#include "glx/closed_form.hpp"

#include <algorithm>
#include <cmath>

namespace glx {

const char* to_string(SolutionMethod m) {
  switch (m) {
    case SolutionMethod::closed_exact: return "closed_exact";
    case SolutionMethod::closed_approx: return "closed_approx";
    case SolutionMethod::numerical: return "numerical";
    case SolutionMethod::warm_started: return "warm_started";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Condition checks
// ---------------------------------------------------------------------------

namespace {

// I + normalized residue restricted to component `verts` (empty = all).
SparseSymmetricMatrix unit_plus_normalized(const ResidueMatrix& res,
                                           const std::vector<int>& verts) {
  if (verts.empty()) {
    SparseSymmetricMatrix m = res.normalized;
    m.mutable_diagonal().setOnes();
    return m;
  }
  std::vector<int> local(res.dim, -1);
  for (std::size_t k = 0; k < verts.size(); ++k)
    local[verts[k]] = static_cast<int>(k);
  SparseSymmetricMatrix m(static_cast<int>(verts.size()));
  m.mutable_diagonal().setOnes();
  for (const auto& e : res.normalized.offdiag()) {
    int li = local[e.i], lj = local[e.j];
    if (li >= 0 && lj >= 0) m.push_offdiag(li, lj, e.value);
  }
  m.finalize();
  return m;
}

ConditionReport build_report(const CovarianceInput& c,
                             const ResidueMatrix& res, PdScope scope) {
  const int d = c.dim();
  const double lambda = res.lambda;
  ConditionReport rep;
  rep.lambda = lambda;
  rep.alpha = res.max_abs_normalized;
  rep.gap_lhs = rep.alpha * rep.alpha;

  SupportGraph g = support_graph(res.entries);
  ComponentDecomposition comps = decompose(g);
  rep.acyclic = is_acyclic(g);

  // One pass over the strict lower triangle (column-major order, so the
  // dense accesses are contiguous) collects every pairwise statistic at
  // once: the two gap right-hand sides, the per-component gap minima, and
  // the magnitude rungs bracketing lambda for the sufficient statistic.
  const auto& a = c.sigma.dense();
  const auto& sd = res.scaling.sqrt_d;
  double rhs_thr = std::numeric_limits<double>::infinity();
  double rhs_off = std::numeric_limits<double>::infinity();
  std::vector<double> comp_rhs(comps.num_components(),
                               std::numeric_limits<double>::infinity());
  double s1 = 0.0;  // largest off-diagonal magnitude
  double sk = std::numeric_limits<double>::infinity();  // smallest > lambda
  double sk1 = 0.0;        // largest magnitude <= lambda (nonzero entries)
  bool below_any = false;  // saw a nonzero magnitude <= lambda
  bool any_zero_pair = false;
  for (int j = 0; j < d; ++j) {
    const auto& nbrs = g.adj[j];
    std::size_t p = 0;
    while (p < nbrs.size() && nbrs[p] <= j) ++p;
    const int cj = comps.component_of[j];
    for (int i = j + 1; i < d; ++i) {
      const double av = std::abs(a(i, j));
      if (av == 0.0) {
        any_zero_pair = true;
      } else {
        if (av > s1) s1 = av;
        if (av > lambda) {
          if (av < sk) sk = av;
        } else {
          below_any = true;
          if (av > sk1) sk1 = av;
        }
      }
      const double gap = (lambda - av) / (sd[i] * sd[j]);
      if (av <= lambda && gap < rhs_thr) rhs_thr = gap;
      while (p < nbrs.size() && nbrs[p] < i) ++p;
      if (p < nbrs.size() && nbrs[p] == i) continue;  // support edge
      if (gap < rhs_off) rhs_off = gap;
      if (cj >= 0 && cj == comps.component_of[i] && gap < comp_rhs[cj])
        comp_rhs[cj] = gap;
    }
  }
  rep.gap_rhs_thresholded = rhs_thr;
  rep.gap_rhs_offsupport = rhs_off;
  rep.gap_ok = rep.gap_lhs <= rhs_thr;
  rep.gap_ok_offsupport = rep.gap_lhs <= rhs_off;

  // Per-component records; the gap is the component subproblem's own.
  std::vector<double> comp_alpha(comps.num_components(), 0.0);
  for (const auto& e : res.normalized.offdiag()) {
    double& m = comp_alpha[comps.component_of[e.i]];
    m = std::max(m, std::abs(e.value));
  }
  rep.components.reserve(comps.num_components());
  bool all_pd = true;
  for (int id = 0; id < comps.num_components(); ++id) {
    const auto& verts = comps.vertices[id];
    ComponentConditionRecord r;
    r.id = id;
    r.size = static_cast<int>(verts.size());
    std::int64_t edges = 0;
    for (int v : verts) edges += static_cast<std::int64_t>(g.adj[v].size());
    edges /= 2;
    r.acyclic = (edges == static_cast<std::int64_t>(verts.size()) - 1);
    r.gap_lhs = comp_alpha[id] * comp_alpha[id];
    r.gap_rhs = comp_rhs[id];
    r.gap_ok = r.gap_lhs <= r.gap_rhs;
    if (r.size == 1) {
      r.pd = true;  // the block is the 1x1 identity
    } else if (scope == PdScope::certificate || r.acyclic) {
      r.pd = is_positive_definite_sparse(unit_plus_normalized(res, verts));
    }  // screened cyclic component: pd stays false, no factorization
    all_pd = all_pd && r.pd;
    rep.components.push_back(std::move(r));
  }
  // The components are the diagonal blocks of I + normalized residue (every
  // vertex lands in exactly one, isolated vertices as unit singletons), so
  // their conjunction is the global clause.
  rep.pd = all_pd;

  // Scale-invariant sufficient statistic at the magnitude interval holding
  // lambda. Defined only with a kept magnitude above and a strictly smaller
  // magnitude (or an exact-zero pair) below.
  if (std::isfinite(sk)) {
    double next = -1.0;
    if (below_any)
      next = sk1;
    else if (any_zero_pair)
      next = 0.0;
    if (next >= 0.0 && lambda > next) {
      const double smax = res.scaling.d.maxCoeff();
      const double smin = res.scaling.d.minCoeff();
      const double ratio = smax / smin;
      const double num = (2.0 * s1 - sk - next) / smax;
      const double den = (sk - next) / smax;
      rep.suff_stat_defined = true;
      rep.suff_stat_lhs = num * num / den;
      rep.suff_stat_rhs = 2.0 / (ratio * ratio);
      rep.suff_stat_ok = rep.suff_stat_lhs <= rep.suff_stat_rhs;
    }
  }
  return rep;
}

}  // namespace

ConditionReport check_conditions(const CovarianceInput& c, double lambda,
                                 PdScope scope) {
  return build_report(c, residue(c, lambda), scope);
}

bool dt_positive_definite_check(const SparseSymmetricMatrix& s,
                                const CovarianceInput& c, double lambda) {
  const int d = c.dim();
  if (s.dim() != d)
    throw DimensionMismatchError("dt_positive_definite_check: dimensions");
  const auto& a = c.sigma.dense();
  SparseSymmetricMatrix m(d);
  m.mutable_diagonal() = a.diagonal();
  for (const auto& e : s.offdiag()) {
    if (e.value == 0.0) continue;
    const double sgn = e.value > 0.0 ? 1.0 : -1.0;
    m.push_offdiag(e.i, e.j, a(e.i, e.j) + lambda * sgn);
  }
  m.finalize();
  return is_positive_definite_sparse(m);
}

// ---------------------------------------------------------------------------
// Closed-form estimates
// ---------------------------------------------------------------------------

GlSolution approx_solution(const ResidueMatrix& res) {
  const int d = res.dim;
  const auto& sig = res.scaling.d;
  // Degeneracy guard: |normalized entry| >= 1 makes the edge denominator
  // nonpositive.
  for (const auto& e : res.normalized.offdiag())
    if (std::abs(e.value) >= 1.0)
      throw DegenerateEntryError(e.i, e.j, std::abs(e.value));

  GlSolution sol;
  sol.lambda = res.lambda;
  sol.method = SolutionMethod::closed_approx;
  sol.estimate = SparseSymmetricMatrix(d);
  Eigen::VectorXd diag = sig.cwiseInverse();
  for (const auto& e : res.entries.offdiag()) {
    const double denom = sig[e.i] * sig[e.j] - e.value * e.value;
    sol.estimate.push_offdiag(e.i, e.j, -e.value / denom);
    const double add = e.value * e.value / denom;
    diag[e.i] += add / sig[e.i];
    diag[e.j] += add / sig[e.j];
  }
  sol.estimate.mutable_diagonal() = diag;
  sol.estimate.finalize();
  return sol;
}

GlSolution exact_solution(const CovarianceInput& c, double lambda) {
  ResidueMatrix res = residue(c, lambda);
  ConditionReport rep = build_report(c, res, PdScope::certificate);
  if (!rep.all_exact()) throw ConditionsFailedError(std::move(rep));
  GlSolution sol = approx_solution(res);
  sol.method = SolutionMethod::closed_exact;
  return sol;
}

// ---------------------------------------------------------------------------
// Tree complement / inverse
// ---------------------------------------------------------------------------

namespace {

void require_tree_input(const SymmetricMatrix& m, const SupportGraph& g) {
  const int d = m.dim();
  if (g.num_vertices != d)
    throw DimensionMismatchError("tree ops: graph/matrix dimension mismatch");
  for (int i = 0; i < d; ++i)
    if (m(i, i) != 1.0)
      throw std::invalid_argument("tree ops: diagonal must be exactly 1");
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const bool edge = g.has_edge(i, j);
      if (edge && m(i, j) == 0.0)
        throw std::invalid_argument("tree ops: zero entry on a declared edge");
      if (!edge && m(i, j) != 0.0)
        throw std::invalid_argument("tree ops: nonzero entry off the graph");
      if (edge && std::abs(m(i, j)) >= 1.0)
        throw DegenerateEntryError(i, j, std::abs(m(i, j)));
    }
  if (!is_acyclic(g)) throw NotAcyclicError();
}

}  // namespace

SymmetricMatrix tree_complement(const SymmetricMatrix& m,
                                const SupportGraph& g) {
  require_tree_input(m, g);
  const int d = m.dim();
  SymmetricMatrix n(d);
  // DFS from every root accumulating edge products along the unique paths.
  std::vector<int> stack;
  std::vector<double> prod(d);
  std::vector<char> seen(d);
  for (int root = 0; root < d; ++root) {
    std::fill(seen.begin(), seen.end(), 0);
    seen[root] = 1;
    prod[root] = 1.0;
    stack.assign(1, root);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : g.adj[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        prod[v] = prod[u] * m(u, v);
        stack.push_back(v);
        if (v > root && !g.has_edge(root, v)) n.set(root, v, prod[v]);
      }
    }
  }
  // Verification: the completed matrix is PD and its inverse vanishes off g.
  SymmetricMatrix completed =
      SymmetricMatrix::from_dense(m.dense() + n.dense());
  int pivot = -1;
  auto f = try_cholesky(completed, &pivot);
  if (!f) throw NotPositiveDefiniteError(pivot);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd inv = f->solve(eye);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (!g.has_edge(i, j) && std::abs(inv(i, j)) > 1e-8)
        throw std::runtime_error(
            "tree_complement: completed inverse leaks outside the support");
  return n;
}

SparseSymmetricMatrix tree_inverse(const SymmetricMatrix& m,
                                   const SupportGraph& g) {
  require_tree_input(m, g);
  const int d = m.dim();
  SparseSymmetricMatrix a(d);
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(d);
  for (int i = 0; i < d; ++i) {
    for (int j : g.adj[i]) {
      const double w = m(i, j);
      if (j > i) a.push_offdiag(i, j, -w / (1.0 - w * w));
      diag[i] += w * w / (1.0 - w * w);
    }
  }
  a.mutable_diagonal() = diag;
  a.finalize();

  // Verify against the complement route: A * (m + N) must be the identity.
  SymmetricMatrix n = tree_complement(m, g);
  Eigen::MatrixXd completed = m.dense() + n.dense();
  Eigen::MatrixXd prod = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    prod.row(i) += diag[i] * completed.row(i);
    for (int j : g.adj[i]) prod.row(i) += a.entry(i, j) * completed.row(j);
  }
  const double err = (prod - Eigen::MatrixXd::Identity(d, d))
                         .cwiseAbs()
                         .maxCoeff();
  if (err > 1e-10)
    throw std::runtime_error(
        "tree_inverse: explicit formula disagrees with the complement route "
        "(residual " + std::to_string(err) + ")");
  return a;
}

// ---------------------------------------------------------------------------
// Path sums
// ---------------------------------------------------------------------------

namespace {

struct PathSummer {
  const SupportGraph& g;
  const Eigen::MatrixXd& w;  // normalized edge weights (dense lookup)
  std::int64_t cap;
  std::int64_t budget;
  Eigen::MatrixXd& r;
  int source = 0;
  std::vector<std::int64_t> count;
  std::vector<char> on_path;

  PathSummer(const SupportGraph& gg, const Eigen::MatrixXd& ww,
             std::int64_t cap_, Eigen::MatrixXd& rr)
      : g(gg), w(ww), cap(cap_), budget(64 * cap_), r(rr),
        count(gg.num_vertices, 0), on_path(gg.num_vertices, 0) {}

  void dfs(int u, double prod) {
    if (--budget < 0) throw PathCountOverflowError(cap);
    on_path[u] = 1;
    for (int v : g.adj[u]) {
      if (on_path[v]) continue;
      if (++count[v] > cap) throw PathCountOverflowError(cap);
      const double p = prod * w(u, v);
      r(source, v) += p;
      dfs(v, p);
    }
    on_path[u] = 0;
  }
};

}  // namespace

SymmetricMatrix path_sum_matrix(const ResidueMatrix& res, std::int64_t cap) {
  const int d = res.dim;
  Eigen::MatrixXd w = res.normalized.to_dense();
  SupportGraph g = support_graph(res.normalized);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(d, d);
  PathSummer ps(g, w, cap, r);
  for (int s = 0; s < d; ++s) {
    std::fill(ps.count.begin(), ps.count.end(), 0);
    ps.source = s;
    ps.dfs(s, 1.0);
  }
  // Path sums are direction-symmetric; average away traversal round-off.
  Eigen::MatrixXd sym = 0.5 * (r + r.transpose());
  sym.diagonal().setOnes();
  return SymmetricMatrix::from_dense(sym);
}

SymmetricMatrix relaxed_inverse_candidate(const ResidueMatrix& res,
                                          std::int64_t cap) {
  SymmetricMatrix r = path_sum_matrix(res, cap);
  const int d = res.dim;
  const auto& sig = res.scaling.d;
  const auto& sd = res.scaling.sqrt_d;
  SymmetricMatrix b(d);
  for (int i = 0; i < d; ++i) {
    b.set(i, i, sig[i]);  // exact diagonal, not (sqrt sigma_ii)^2
    for (int j = i + 1; j < d; ++j)
      if (r(i, j) != 0.0) b.set(i, j, sd[i] * sd[j] * r(i, j));
  }
  return b;
}

// ---------------------------------------------------------------------------
// Epsilon certificate
// ---------------------------------------------------------------------------

EpsilonCertificate epsilon_certificate(const ResidueMatrix& res,
                                       std::int64_t cap) {
  EpsilonCertificate cert;
  cert.alpha = res.max_abs_normalized;
  cert.sigma_max = res.scaling.d.maxCoeff();
  cert.sigma_min = res.scaling.d.minCoeff();

  SupportGraph g = support_graph(res.entries);
  CycleStats stats = cycle_stats(g, cap);
  cert.girth = stats.girth;
  cert.p_max = stats.p_max;
  cert.max_degree = stats.max_degree;

  const double a2 = cert.alpha * cert.alpha;
  if (stats.max_degree >= 1 && a2 < 1.0) {
    cert.delta = 1.0 + stats.max_degree * a2 / (1.0 - a2) +
                 (stats.max_degree - 1) / (1.0 - a2);
  } else {
    cert.delta = 1.0;  // edgeless or degenerate; never enters the formula
  }

  // A normalized entry at or above 1 voids the closed form itself (its
  // denominators hit zero), so no quality claim is possible — not even the
  // acyclic one, whose zero comes from a factor of a formula that no longer
  // applies. Path-enumeration overflow likewise leaves epsilon unknown.
  if (cert.alpha >= 1.0 || stats.p_max_overflowed) {
    cert.unbounded = true;
    cert.epsilon = std::numeric_limits<double>::infinity();
    return cert;
  }
  if (stats.acyclic) {
    cert.epsilon = 0.0;
    return cert;
  }
  const double scale =
      std::max(cert.sigma_max, std::sqrt(cert.sigma_max / cert.sigma_min));
  const int half_girth = (cert.girth + 1) / 2;  // ceil(c/2)
  cert.epsilon = scale * cert.delta *
                 static_cast<double>(cert.p_max - 1) *
                 std::pow(cert.alpha, half_girth);
  return cert;
}

void attach_perturbation_bound(EpsilonCertificate& cert,
                               const SparseSymmetricMatrix& a) {
  SupportGraph g = support_graph(a);
  ComponentDecomposition comps = decompose(g);
  int d_max = 0;
  for (const auto& verts : comps.vertices)
    d_max = std::max<int>(d_max, verts.size());

  EigenBounds mu = extreme_eigenvalues(a.to_symmetric());
  cert.mu_min_a = mu.min;
  cert.mu_max_a = mu.max;
  if (!(mu.min > 0.0))
    throw CertificateUnavailableError(
        "perturbation bound undefined: estimate is not positive definite "
        "(mu_min = " + std::to_string(mu.min) + ")");
  cert.perturbation_bound = d_max * (1.0 / mu.min + 1.0) * cert.epsilon;
  // mu_max of the unknown optimum proxied by 1/sigma_min (flagged).
  cert.optgap_bound =
      (mu.max + 1.0 / cert.sigma_min) * cert.perturbation_bound;
  cert.optgap_uses_proxy = true;
}

}  // namespace glx
