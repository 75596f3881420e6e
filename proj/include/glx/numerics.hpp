#pragma once

// Dense/sparse symmetric storage and the small set of factorization-based
// primitives everything else sits on: Cholesky with a deterministic pivot
// tolerance, log-determinant, linear solves, full inverse, certified extreme
// eigenvalues, and norms.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace glx {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct NotPositiveDefiniteError : std::runtime_error {
  explicit NotPositiveDefiniteError(int pivot)
      : std::runtime_error("matrix is not positive definite (pivot " +
                           std::to_string(pivot) + ")"),
        pivot_index(pivot) {}
  int pivot_index;  // first column whose pivot fell at or below tolerance
};

struct DimensionMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// SymmetricMatrix: dense symmetric d x d, symmetry enforced structurally.
// ---------------------------------------------------------------------------

class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(int dim) : m_(Eigen::MatrixXd::Zero(dim, dim)) {}

  // Symmetrizes structurally: the strict lower triangle wins.
  static SymmetricMatrix from_dense(const Eigen::MatrixXd& a);
  // Requires a to be symmetric to within `tol` entrywise; throws otherwise.
  static SymmetricMatrix from_dense_checked(const Eigen::MatrixXd& a,
                                            double tol = 1e-12);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Eigen::MatrixXd& dense() const { return m_; }
  Eigen::MatrixXd& mutable_dense() { return m_; }  // caller keeps symmetry

  static SymmetricMatrix identity(int dim);

 private:
  Eigen::MatrixXd m_;
};

// ---------------------------------------------------------------------------
// SparseSymmetricMatrix: diagonal + sorted strictly-lower off-diagonal
// entries. Structural zeros are exact; entry order is (i,j), i > j,
// lexicographic by (j, i) -- i.e. column-major lower triangle.
// ---------------------------------------------------------------------------

struct OffDiagEntry {
  int i;  // row, i > j
  int j;  // col
  double value;
};

class SparseSymmetricMatrix {
 public:
  SparseSymmetricMatrix() = default;
  explicit SparseSymmetricMatrix(int dim)
      : dim_(dim), diag_(Eigen::VectorXd::Zero(dim)) {}
  SparseSymmetricMatrix(int dim, Eigen::VectorXd diag,
                        std::vector<OffDiagEntry> offdiag);

  int dim() const { return dim_; }
  const Eigen::VectorXd& diagonal() const { return diag_; }
  Eigen::VectorXd& mutable_diagonal() { return diag_; }
  const std::vector<OffDiagEntry>& offdiag() const { return off_; }

  // Number of stored strictly-lower entries.
  std::int64_t nnz_offdiag() const {
    return static_cast<std::int64_t>(off_.size());
  }

  // 0.0 for entries outside the stored pattern.
  double entry(int i, int j) const;

  // Append (i, j, v); entries must arrive in sorted order or be sorted after
  // with finalize().
  void push_offdiag(int i, int j, double v);
  void finalize();  // sorts entries, rejects duplicates

  Eigen::MatrixXd to_dense() const;
  SymmetricMatrix to_symmetric() const;
  static SparseSymmetricMatrix from_dense(const Eigen::MatrixXd& a,
                                          double zero_tol = 0.0);

 private:
  int dim_ = 0;
  Eigen::VectorXd diag_;
  std::vector<OffDiagEntry> off_;  // sorted by (j, i)
};

// ---------------------------------------------------------------------------
// Cholesky
// ---------------------------------------------------------------------------

class CholeskyFactor {
 public:
  explicit CholeskyFactor(Eigen::MatrixXd lower) : l_(std::move(lower)) {}

  int dim() const { return static_cast<int>(l_.rows()); }
  const Eigen::MatrixXd& lower() const { return l_; }

  double log_det() const;  // of the factored matrix, = 2 * sum log L_ii
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  Eigen::MatrixXd l_;
};

// Relative pivot tolerance: a pivot <= tol * max(diagonal) is a failure.
inline constexpr double kPivotRelTol = 1e-12;

// Factor m = L L^T. On failure reports the first offending pivot index.
// try_cholesky never throws on indefiniteness; cholesky throws
// NotPositiveDefiniteError carrying the pivot index.
std::optional<CholeskyFactor> try_cholesky(const SymmetricMatrix& m,
                                           int* failed_pivot = nullptr);
CholeskyFactor cholesky(const SymmetricMatrix& m);

bool is_positive_definite(const SymmetricMatrix& m);

// PD test for a sparse symmetric matrix without densifying (simplicial
// LLT with fill-reducing ordering); used by the O(d^2) condition pipeline.
bool is_positive_definite_sparse(const SparseSymmetricMatrix& m);

// ---------------------------------------------------------------------------
// Derived operations
// ---------------------------------------------------------------------------

double log_det(const SymmetricMatrix& m);  // throws if not PD

Eigen::VectorXd solve(const SymmetricMatrix& m, const Eigen::VectorXd& b);
Eigen::MatrixXd solve(const SymmetricMatrix& m, const Eigen::MatrixXd& b);

SymmetricMatrix inverse(const SymmetricMatrix& m);  // throws if not PD

// Certified extreme eigenvalues of a symmetric (not necessarily PD) matrix.
// Gershgorin brackets narrowed by a few power iterations, finished by
// Cholesky-shift bisection: m - s*I PD <=> s < lambda_min(m). `rel_tol` is
// relative to the Gershgorin radius. Returns {lambda_min, lambda_max}.
struct EigenBounds {
  double min;
  double max;
};
EigenBounds extreme_eigenvalues(const SymmetricMatrix& m,
                                double rel_tol = 1e-10);

// Norms. max_offdiag ignores the diagonal entirely.
double frobenius_norm(const SymmetricMatrix& m);
double max_abs_offdiag(const SymmetricMatrix& m);
double max_abs_offdiag(const SparseSymmetricMatrix& m);
double l1_offdiag(const SymmetricMatrix& m);  // sum |m_ij|, i != j

}  // namespace glx
