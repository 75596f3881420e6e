#include "glx/datagen.hpp"

#include "glx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace glx {

namespace {

// Uniform random labeled tree on d >= 2 vertices via a random Prufer
// sequence; returns the edge list.
std::vector<std::pair<int, int>> random_tree(int d, SplitMix64& rng) {
  std::vector<std::pair<int, int>> edges;
  if (d == 2) {
    edges.emplace_back(0, 1);
    return edges;
  }
  std::vector<int> prufer(d - 2);
  for (int& x : prufer) x = static_cast<int>(rng.below(d));
  std::vector<int> degree(d, 1);
  for (int x : prufer) ++degree[x];
  std::set<int> leaves;
  for (int v = 0; v < d; ++v)
    if (degree[v] == 1) leaves.insert(v);
  for (int x : prufer) {
    const int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    edges.emplace_back(std::min(leaf, x), std::max(leaf, x));
    if (--degree[x] == 1) leaves.insert(x);
  }
  const int a = *leaves.begin();
  const int b = *std::next(leaves.begin());
  edges.emplace_back(std::min(a, b), std::max(a, b));
  return edges;
}

// Nudge exact magnitude duplicates apart so the ladder has no ties.
void break_magnitude_ties(std::vector<double*>& values, SplitMix64& rng) {
  for (bool again = true; again;) {
    again = false;
    std::vector<std::pair<double, double*>> mags;
    mags.reserve(values.size());
    for (double* p : values) mags.emplace_back(std::abs(*p), p);
    std::sort(mags.begin(), mags.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < mags.size(); ++i)
      if (mags[i].first == mags[i - 1].first && mags[i].first != 0.0) {
        double* p = mags[i].second;
        const double sgn = *p >= 0.0 ? 1.0 : -1.0;
        *p += sgn * 1e-9 * (0.5 + rng.uniform01());
        again = true;
      }
  }
}

}  // namespace

SyntheticInstance random_precision(int d, std::int64_t target_nnz,
                                   std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("random_precision: d must be >= 1");
  const std::int64_t all_pairs = static_cast<std::int64_t>(d) * (d - 1) / 2;
  if (target_nnz < 0 || target_nnz > all_pairs)
    throw std::invalid_argument("random_precision: target_nnz out of range");

  SplitMix64 rng = SplitMix64::substream(seed, 0x9e1);
  // P(entry of U nonzero); expected off-diagonal nnz of U U^T is about
  // (d(d-1)/2) * d * p^2 for small p.
  double p = target_nnz == 0
                 ? 0.0
                 : std::sqrt(2.0 * static_cast<double>(target_nnz) /
                             (static_cast<double>(d) * d * d));
  p = std::min(p, 0.45);

  for (int attempt = 0; attempt < 8; ++attempt) {
    // Sparse draw of U: per column, the list of (row, sign) nonzeros.
    std::vector<std::vector<std::pair<int, double>>> cols(d);
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        if (rng.uniform01() < p) cols[k].emplace_back(i, rng.sign());

    // Accumulate U U^T from column outer products.
    std::vector<OffDiagEntry> raw;
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(d, 2.0);
    for (const auto& col : cols)
      for (std::size_t x = 0; x < col.size(); ++x) {
        diag[col[x].first] += 1.0;
        for (std::size_t y = x + 1; y < col.size(); ++y)
          raw.push_back({std::max(col[x].first, col[y].first),
                         std::min(col[x].first, col[y].first),
                         col[x].second * col[y].second});
      }
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
      return std::make_pair(a.j, a.i) < std::make_pair(b.j, b.i);
    });
    std::vector<OffDiagEntry> merged;
    for (const auto& e : raw) {
      if (!merged.empty() && merged.back().i == e.i && merged.back().j == e.j)
        merged.back().value += e.value;
      else
        merged.push_back(e);
    }
    std::erase_if(merged, [](const OffDiagEntry& e) { return e.value == 0.0; });

    const std::int64_t got = static_cast<std::int64_t>(merged.size());
    if (target_nnz == 0 ? got == 0
                        : std::abs(static_cast<double>(got - target_nnz)) <=
                              0.15 * static_cast<double>(target_nnz)) {
      SparseSymmetricMatrix prec(d, diag, std::move(merged));
      SymmetricMatrix cov = inverse(prec.to_symmetric());
      SyntheticInstance inst{std::move(prec), CovarianceInput(std::move(cov)),
                             0.0, 0.0, 0.0, seed};
      return inst;
    }
    if (got > 0)
      p *= std::sqrt(static_cast<double>(target_nnz) /
                     static_cast<double>(got));
    else
      p *= 2.0;
    p = std::min(std::max(p, 1e-9), 0.45);
  }
  throw std::runtime_error(
      "random_precision: failed to calibrate the requested sparsity");
}

SampleSet sample_gaussian(const CovarianceInput& c, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_gaussian: n must be >= 1");
  const int d = c.dim();
  CholeskyFactor f = cholesky(c.sigma);
  SampleSet s;
  s.rows.resize(n, d);
  Eigen::VectorXd z(d);
  for (int r = 0; r < n; ++r) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(r));
    for (int i = 0; i < d; ++i) z[i] = rng.gaussian();
    s.rows.row(r) =
        (f.lower().triangularView<Eigen::Lower>() * z).transpose();
  }
  return s;
}

SyntheticInstance spanning_tree_covariance(int d, double omega,
                                           std::uint64_t seed) {
  if (d < 2)
    throw std::invalid_argument("spanning_tree_covariance: d must be >= 2");
  if (!(omega > 0.01))
    throw std::invalid_argument(
        "spanning_tree_covariance: omega must exceed 0.01");
  const double off_bound = std::max(0.0, 0.85 - omega);

  SplitMix64 rng = SplitMix64::substream(seed, 0x7e3);
  SymmetricMatrix sigma = SymmetricMatrix::identity(d);
  const auto tree = random_tree(d, rng);
  std::vector<std::vector<char>> on_tree(d, std::vector<char>(d, 0));
  for (const auto& [a, b] : tree) {
    on_tree[a][b] = on_tree[b][a] = 1;
    sigma.set(a, b, rng.sign() * (0.85 + 0.10 * rng.uniform01()));
  }
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i)
      if (!on_tree[i][j]) sigma.set(i, j, rng.uniform(-off_bound, off_bound));

  // Distinct magnitudes keep the ladder tie-free.
  {
    std::vector<double*> ptrs;
    // Work on a copy of the strict lower triangle, then write back.
    std::vector<std::pair<std::pair<int, int>, double>> cells;
    for (int j = 0; j < d; ++j)
      for (int i = j + 1; i < d; ++i)
        cells.push_back({{i, j}, sigma(i, j)});
    ptrs.reserve(cells.size());
    for (auto& cell : cells) ptrs.push_back(&cell.second);
    break_magnitude_ties(ptrs, rng);
    for (const auto& [ij, v] : cells) sigma.set(ij.first, ij.second, v);
  }

  double max_off = 0.0;
  double min_tree = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      if (on_tree[i][j])
        min_tree = std::min(min_tree, std::abs(sigma(i, j)));
      else
        max_off = std::max(max_off, std::abs(sigma(i, j)));
    }

  SyntheticInstance inst{SparseSymmetricMatrix(),
                         CovarianceInput(std::move(sigma)),
                         max_off,
                         min_tree,
                         0.5 * (max_off + min_tree),
                         seed};
  return inst;
}

SyntheticInstance cycle_covariance(int d, std::uint64_t seed) {
  if (d < 3) throw std::invalid_argument("cycle_covariance: d must be >= 3");
  SplitMix64 rng = SplitMix64::substream(seed, 0xc1c);
  SymmetricMatrix sigma = SymmetricMatrix::identity(d);
  for (int v = 0; v < d; ++v) {
    const int w = (v + 1) % d;
    sigma.set(v, w, rng.sign() * 0.8);
  }
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      const bool cycle_edge =
          (i == j + 1) || (j == 0 && i == d - 1);
      if (!cycle_edge) sigma.set(i, j, rng.uniform(-0.7, 0.7));
    }
  CovarianceInput cov{std::move(sigma)};
  // Verified at generation: I + normalized residue at the recommended
  // threshold is strictly diagonally dominant (two residue entries of
  // magnitude 0.05 per row).
  {
    ResidueMatrix res = residue(cov, 0.75);
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(d);
    for (const auto& e : res.normalized.offdiag()) {
      rowsum[e.i] += std::abs(e.value);
      rowsum[e.j] += std::abs(e.value);
    }
    if (rowsum.maxCoeff() >= 1.0)
      throw std::logic_error(
          "cycle_covariance: generated residue lost diagonal dominance");
  }
  SyntheticInstance inst{SparseSymmetricMatrix(), std::move(cov),
                         0.7,
                         0.8,
                         0.75,
                         seed};
  return inst;
}

}  // namespace glx
