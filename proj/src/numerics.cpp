#include "glx/numerics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>

namespace glx {

// ---------------------------------------------------------------------------
// SymmetricMatrix
// ---------------------------------------------------------------------------

SymmetricMatrix SymmetricMatrix::from_dense(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw DimensionMismatchError("from_dense: matrix is not square");
  SymmetricMatrix s(static_cast<int>(a.rows()));
  s.m_ = a;
  // Lower triangle wins; copy it into the upper.
  s.m_.triangularView<Eigen::StrictlyUpper>() =
      a.transpose().triangularView<Eigen::StrictlyUpper>();
  return s;
}

SymmetricMatrix SymmetricMatrix::from_dense_checked(const Eigen::MatrixXd& a,
                                                    double tol) {
  if (a.rows() != a.cols())
    throw DimensionMismatchError("from_dense_checked: matrix is not square");
  if (((a - a.transpose()).cwiseAbs().maxCoeff()) > tol)
    throw DimensionMismatchError("from_dense_checked: matrix is not symmetric");
  return from_dense(a);
}

SymmetricMatrix SymmetricMatrix::identity(int dim) {
  SymmetricMatrix s(dim);
  s.m_ = Eigen::MatrixXd::Identity(dim, dim);
  return s;
}

// ---------------------------------------------------------------------------
// SparseSymmetricMatrix
// ---------------------------------------------------------------------------

namespace {
bool entry_order(const OffDiagEntry& a, const OffDiagEntry& b) {
  return a.j != b.j ? a.j < b.j : a.i < b.i;
}
}  // namespace

SparseSymmetricMatrix::SparseSymmetricMatrix(int dim, Eigen::VectorXd diag,
                                             std::vector<OffDiagEntry> offdiag)
    : dim_(dim), diag_(std::move(diag)), off_(std::move(offdiag)) {
  if (diag_.size() != dim_)
    throw DimensionMismatchError("sparse matrix: diagonal length != dim");
  finalize();
}

double SparseSymmetricMatrix::entry(int i, int j) const {
  if (i == j) return diag_[i];
  OffDiagEntry probe{std::max(i, j), std::min(i, j), 0.0};
  auto it = std::lower_bound(off_.begin(), off_.end(), probe, entry_order);
  if (it != off_.end() && it->i == probe.i && it->j == probe.j)
    return it->value;
  return 0.0;
}

void SparseSymmetricMatrix::push_offdiag(int i, int j, double v) {
  if (i == j) throw DimensionMismatchError("push_offdiag: diagonal entry");
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
    throw DimensionMismatchError("push_offdiag: index out of range");
  off_.push_back(OffDiagEntry{std::max(i, j), std::min(i, j), v});
}

void SparseSymmetricMatrix::finalize() {
  std::sort(off_.begin(), off_.end(), entry_order);
  for (std::size_t k = 1; k < off_.size(); ++k) {
    if (off_[k].i == off_[k - 1].i && off_[k].j == off_[k - 1].j)
      throw DimensionMismatchError("sparse matrix: duplicate off-diag entry");
  }
}

Eigen::MatrixXd SparseSymmetricMatrix::to_dense() const {
  Eigen::MatrixXd a = diag_.asDiagonal();
  for (const auto& e : off_) {
    a(e.i, e.j) = e.value;
    a(e.j, e.i) = e.value;
  }
  return a;
}

SymmetricMatrix SparseSymmetricMatrix::to_symmetric() const {
  return SymmetricMatrix::from_dense(to_dense());
}

SparseSymmetricMatrix SparseSymmetricMatrix::from_dense(
    const Eigen::MatrixXd& a, double zero_tol) {
  if (a.rows() != a.cols())
    throw DimensionMismatchError("from_dense: matrix is not square");
  int d = static_cast<int>(a.rows());
  SparseSymmetricMatrix s(d);
  s.diag_ = a.diagonal();
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i)
      if (std::abs(a(i, j)) > zero_tol)
        s.off_.push_back(OffDiagEntry{i, j, a(i, j)});
  return s;
}

// ---------------------------------------------------------------------------
// Cholesky
// ---------------------------------------------------------------------------

double CholeskyFactor::log_det() const {
  double acc = 0.0;
  for (int i = 0; i < dim(); ++i) acc += std::log(l_(i, i));
  return 2.0 * acc;
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd y = l_.triangularView<Eigen::Lower>().solve(b);
  return l_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Eigen::MatrixXd CholeskyFactor::solve(const Eigen::MatrixXd& b) const {
  Eigen::MatrixXd y = l_.triangularView<Eigen::Lower>().solve(b);
  return l_.transpose().triangularView<Eigen::Upper>().solve(y);
}

namespace {

// Reference column Cholesky with the documented pivot rule; locates the first
// failing pivot exactly. O(k d^2) when failing at column k.
std::optional<Eigen::MatrixXd> reference_cholesky(const Eigen::MatrixXd& a,
                                                  double pivot_floor,
                                                  int* failed_pivot) {
  const int d = static_cast<int>(a.rows());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > pivot_floor)) {  // also catches NaN
      if (failed_pivot) *failed_pivot = j;
      return std::nullopt;
    }
    l(j, j) = std::sqrt(pivot);
    if (j + 1 < d) {
      l.col(j).tail(d - j - 1) =
          (a.col(j).tail(d - j - 1) -
           l.bottomLeftCorner(d - j - 1, j) * l.row(j).head(j).transpose()) /
          l(j, j);
    }
  }
  return l;
}

double pivot_floor_for(const Eigen::MatrixXd& a) {
  const double max_diag = a.diagonal().maxCoeff();
  return kPivotRelTol * std::max(max_diag, 0.0);
}

}  // namespace

std::optional<CholeskyFactor> try_cholesky(const SymmetricMatrix& m,
                                           int* failed_pivot) {
  const Eigen::MatrixXd& a = m.dense();
  const int d = m.dim();
  if (d == 0) return CholeskyFactor(Eigen::MatrixXd());
  const double floor = pivot_floor_for(a);

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd l = llt.matrixL();
    // The fast path can succeed with a pivot below the documented tolerance;
    // the reference pass then decides and locates the offender.
    bool tiny = false;
    for (int j = 0; j < d; ++j)
      if (!(l(j, j) * l(j, j) > floor)) {
        tiny = true;
        break;
      }
    if (!tiny) return CholeskyFactor(std::move(l));
  }
  auto ref = reference_cholesky(a, floor, failed_pivot);
  if (!ref) return std::nullopt;
  return CholeskyFactor(std::move(*ref));
}

CholeskyFactor cholesky(const SymmetricMatrix& m) {
  int pivot = -1;
  auto f = try_cholesky(m, &pivot);
  if (!f) throw NotPositiveDefiniteError(pivot);
  return std::move(*f);
}

bool is_positive_definite(const SymmetricMatrix& m) {
  return try_cholesky(m).has_value();
}

bool is_positive_definite_sparse(const SparseSymmetricMatrix& m) {
  const int d = m.dim();
  if (d == 0) return true;
  for (int i = 0; i < d; ++i)
    if (!(m.diagonal()[i] > 0.0)) return false;
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  trips.reserve(m.offdiag().size() + static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) trips.emplace_back(i, i, m.diagonal()[i]);
  for (const auto& e : m.offdiag()) trips.emplace_back(e.i, e.j, e.value);
  Eigen::SparseMatrix<double> a(d, d);
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt(a);
  return llt.info() == Eigen::Success;
}

// ---------------------------------------------------------------------------
// Derived operations
// ---------------------------------------------------------------------------

double log_det(const SymmetricMatrix& m) { return cholesky(m).log_det(); }

Eigen::VectorXd solve(const SymmetricMatrix& m, const Eigen::VectorXd& b) {
  return cholesky(m).solve(b);
}

Eigen::MatrixXd solve(const SymmetricMatrix& m, const Eigen::MatrixXd& b) {
  return cholesky(m).solve(b);
}

SymmetricMatrix inverse(const SymmetricMatrix& m) {
  CholeskyFactor f = cholesky(m);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m.dim(), m.dim());
  Eigen::MatrixXd inv = f.solve(eye);
  // Solve round-off can leave ~1e-16 asymmetry; the result is symmetric by
  // construction, so restore it exactly.
  return SymmetricMatrix::from_dense(0.5 * (inv + inv.transpose()));
}

// ---------------------------------------------------------------------------
// Extreme eigenvalues: Gershgorin bracket, Rayleigh-certified narrowing,
// Cholesky-shift bisection.
// ---------------------------------------------------------------------------

namespace {

bool shifted_pd(const Eigen::MatrixXd& a, double shift) {
  // a - shift * I positive definite <=> lambda_min(a) > shift.
  Eigen::MatrixXd b = a;
  b.diagonal().array() -= shift;
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  return llt.info() == Eigen::Success;
}

// Largest Rayleigh quotient found by a short power iteration on the PSD
// shift b = a - lo*I; always a certified lower bound on lambda_max(b).
double rayleigh_lower_bound(const Eigen::MatrixXd& b) {
  const int d = static_cast<int>(b.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
  for (int i = 0; i < d; ++i) v[i] += 1e-3 * std::cos(1.0 + i);  // break symmetry
  v.normalize();
  double best = v.dot(b * v);
  for (int it = 0; it < 24; ++it) {
    Eigen::VectorXd w = b * v;
    double n = w.norm();
    if (n == 0.0) break;
    v = w / n;
    best = std::max(best, v.dot(b * v));
  }
  return best;
}

}  // namespace

EigenBounds extreme_eigenvalues(const SymmetricMatrix& m, double rel_tol) {
  const Eigen::MatrixXd& a = m.dense();
  const int d = m.dim();
  if (d == 0) return {0.0, 0.0};
  if (d == 1) return {a(0, 0), a(0, 0)};

  double lo = a(0, 0), hi = a(0, 0);
  for (int i = 0; i < d; ++i) {
    double r = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
    lo = std::min(lo, a(i, i) - r);
    hi = std::max(hi, a(i, i) + r);
  }
  const double radius = std::max(hi - lo, 1e-300);
  const double tol = rel_tol * radius;

  // Rayleigh narrowing (certified): lambda_max >= lo + ray_hi on a - lo*I,
  // lambda_min <= hi - ray_lo on hi*I - a.
  Eigen::MatrixXd shifted_up = a;
  shifted_up.diagonal().array() -= lo;
  double max_lb = lo + rayleigh_lower_bound(shifted_up);
  Eigen::MatrixXd shifted_down = -a;
  shifted_down.diagonal().array() += hi;
  double min_ub = hi - rayleigh_lower_bound(shifted_down);

  // lambda_min in (l, u]; invariant: a - l*I PD or l < Gershgorin floor.
  double l = lo - tol, u = std::min(min_ub + tol, hi);
  while (u - l > tol) {
    double mid = 0.5 * (l + u);
    if (shifted_pd(a, mid))
      l = mid;
    else
      u = mid;
  }
  double lambda_min = 0.5 * (l + u);

  // lambda_max in [l2, u2); invariant: u2*I - a PD.
  double l2 = std::max(max_lb - tol, lo), u2 = hi + tol;
  while (u2 - l2 > tol) {
    double mid = 0.5 * (l2 + u2);
    Eigen::MatrixXd neg = -a;
    neg.diagonal().array() += mid;
    Eigen::LLT<Eigen::MatrixXd> llt(neg);
    if (llt.info() == Eigen::Success)
      u2 = mid;
    else
      l2 = mid;
  }
  double lambda_max = 0.5 * (l2 + u2);
  return {lambda_min, lambda_max};
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double frobenius_norm(const SymmetricMatrix& m) { return m.dense().norm(); }

double max_abs_offdiag(const SymmetricMatrix& m) {
  double best = 0.0;
  const auto& a = m.dense();
  for (int j = 0; j < m.dim(); ++j)
    for (int i = j + 1; i < m.dim(); ++i)
      best = std::max(best, std::abs(a(i, j)));
  return best;
}

double max_abs_offdiag(const SparseSymmetricMatrix& m) {
  double best = 0.0;
  for (const auto& e : m.offdiag()) best = std::max(best, std::abs(e.value));
  return best;
}

double l1_offdiag(const SymmetricMatrix& m) {
  double acc = 0.0;
  const auto& a = m.dense();
  for (int j = 0; j < m.dim(); ++j)
    for (int i = j + 1; i < m.dim(); ++i) acc += std::abs(a(i, j));
  return 2.0 * acc;
}

}  // namespace glx
