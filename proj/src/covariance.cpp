#include "glx/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace glx {

CovarianceInput::CovarianceInput(SymmetricMatrix s) : sigma(std::move(s)) {
  for (int i = 0; i < sigma.dim(); ++i)
    if (!(sigma(i, i) > 0.0))
      throw std::invalid_argument("covariance diagonal must be positive (at " +
                                  std::to_string(i) + ")");
}

ScalingDiagonal scaling_diagonal(const CovarianceInput& c) {
  ScalingDiagonal s;
  s.d = c.sigma.dense().diagonal();
  s.sqrt_d = s.d.cwiseSqrt();
  return s;
}

// ---------------------------------------------------------------------------
// Residue
// ---------------------------------------------------------------------------

ResidueMatrix residue(const CovarianceInput& c, double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("residue: lambda must be nonnegative");
  const int d = c.dim();
  ResidueMatrix r;
  r.dim = d;
  r.lambda = lambda;
  r.scaling = scaling_diagonal(c);
  r.entries = SparseSymmetricMatrix(d);
  r.normalized = SparseSymmetricMatrix(d);
  const auto& a = c.sigma.dense();
  for (int j = 0; j < d; ++j) {
    for (int i = j + 1; i < d; ++i) {
      const double v = a(i, j);
      if (std::abs(v) > lambda) {
        const double shrunk = v - lambda * (v > 0 ? 1.0 : -1.0);
        r.entries.push_offdiag(i, j, shrunk);
        const double norm =
            shrunk / (r.scaling.sqrt_d[i] * r.scaling.sqrt_d[j]);
        r.normalized.push_offdiag(i, j, norm);
        r.max_abs_normalized = std::max(r.max_abs_normalized, std::abs(norm));
      }
    }
  }
  r.entries.finalize();
  r.normalized.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Magnitude ladder
// ---------------------------------------------------------------------------

MagnitudeLadder magnitude_ladder(const CovarianceInput& c) {
  const int d = c.dim();
  const auto& a = c.sigma.dense();
  std::vector<double> mags;
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i)
      if (a(i, j) != 0.0) mags.push_back(std::abs(a(i, j)));
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  MagnitudeLadder l;
  l.num_offdiag_nonzero = static_cast<int>(mags.size());
  for (std::size_t k = 0; k < mags.size();) {
    std::size_t e = k;
    while (e < mags.size() && mags[e] == mags[k]) ++e;
    l.values.push_back(mags[k]);
    l.multiplicity.push_back(static_cast<int>(e - k));
    k = e;
  }
  return l;
}

double lambda_for_k(const CovarianceInput& c, int k) {
  const int d = c.dim();
  const auto& a = c.sigma.dense();

  // Streaming selection: the threshold needs only the k-th largest magnitude
  // and the largest one strictly below it. Bucketing by value finds both with
  // three passes over the triangle and no d^2/2-sized scratch vector, which
  // keeps the cost a clean quadratic even when the triangle outgrows cache.
  std::int64_t nnz = 0;
  double smax = 0.0;
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      const double av = std::abs(a(i, j));
      if (av != 0.0) {
        ++nnz;
        if (av > smax) smax = av;
      }
    }
  if (k < 0 || static_cast<std::int64_t>(k) > nnz)
    throw std::out_of_range("lambda_for_k: k out of range (0.." +
                            std::to_string(nnz) + ")");
  if (k == 0) {
    if (nnz == 0) return 1.0;  // diagonal matrix: any positive value
    return smax * 1.01;
  }

  constexpr int kBuckets = 4096;
  const double scale = (kBuckets - 1) / smax;  // may overflow for tiny smax
  auto bucket_of = [&](double v) {
    // Clamp before the int cast so an overflowed product stays defined.
    return static_cast<int>(
        std::min(static_cast<double>(kBuckets - 1), v * scale));
  };
  std::vector<std::int64_t> count(kBuckets, 0);
  std::vector<double> bucket_max(kBuckets, 0.0);
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      const double av = std::abs(a(i, j));
      if (av == 0.0) continue;
      const int b = bucket_of(av);
      ++count[b];
      if (av > bucket_max[b]) bucket_max[b] = av;
    }

  // Walk buckets from the top until the k-th largest value's bucket.
  std::int64_t above = 0;  // values in buckets strictly above hb
  int hb = kBuckets - 1;
  for (int b = kBuckets - 1; b >= 0; --b) {
    if (above + count[b] >= k) {
      hb = b;
      break;
    }
    above += count[b];
  }
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(count[hb]));
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      const double av = std::abs(a(i, j));
      if (av != 0.0 && bucket_of(av) == hb) vals.push_back(av);
    }
  const auto rank = static_cast<std::size_t>(k - above);  // 1-based in-bucket
  std::nth_element(vals.begin(), vals.begin() + (rank - 1), vals.end(),
                   std::greater<double>());
  const double upper = vals[rank - 1];  // smallest kept magnitude
  double lower = 0.0;                   // largest dropped
  for (std::size_t t = rank; t < vals.size(); ++t)
    if (vals[t] > lower) lower = vals[t];
  for (int b = hb - 1; b >= 0; --b)
    if (count[b] > 0) {
      if (bucket_max[b] > lower) lower = bucket_max[b];
      break;  // buckets are value-ordered: the first nonempty one suffices
    }
  if (static_cast<std::int64_t>(k) < nnz && lower == upper)
    throw TieAtBoundaryError(
        upper, "lambda_for_k: magnitude tie at " + std::to_string(upper) +
                   " spans k = " + std::to_string(k) +
                   "; no threshold keeps exactly k");
  return 0.5 * (upper + lower);
}

SparseSymmetricMatrix hard_threshold_topk(const CovarianceInput& c, int k) {
  // Reuses the same boundary policy as lambda_for_k, then keeps entries with
  // |sigma_ij| above that cut.
  const double cut = lambda_for_k(c, k);
  const int d = c.dim();
  const auto& a = c.sigma.dense();
  SparseSymmetricMatrix out(d);
  out.mutable_diagonal() = a.diagonal();
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i)
      if (std::abs(a(i, j)) > cut) out.push_offdiag(i, j, a(i, j));
  out.finalize();
  return out;
}

// ---------------------------------------------------------------------------
// Sample covariance
// ---------------------------------------------------------------------------

CovarianceInput sample_covariance(const SampleSet& s, bool unbiased) {
  const int n = s.n();
  if (n < 2) throw std::invalid_argument("sample_covariance: need n >= 2");
  const int denom = unbiased ? n - 1 : n;
  Eigen::RowVectorXd mean = s.rows.colwise().mean();
  Eigen::MatrixXd centered = s.rows.rowwise() - mean;
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(denom);
  return CovarianceInput(SymmetricMatrix::from_dense(cov));
}

}  // namespace glx
