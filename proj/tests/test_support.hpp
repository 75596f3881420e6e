#pragma once

// Shared helpers for the unit-test suite: small matrix builders, reference
// graphs, random instances, and tolerance utilities.

#include "glx/covariance.hpp"
#include "glx/graph.hpp"
#include "glx/numerics.hpp"
#include "glx/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <utility>
#include <vector>

namespace glx::test {

inline SymmetricMatrix sym(std::initializer_list<std::initializer_list<double>> rows) {
  const int d = static_cast<int>(rows.size());
  Eigen::MatrixXd m(d, d);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return SymmetricMatrix::from_dense_checked(m);
}

inline CovarianceInput cov(std::initializer_list<std::initializer_list<double>> rows) {
  return CovarianceInput(sym(rows));
}

// Unit-diagonal matrix with the given strictly-lower entries.
inline SymmetricMatrix unit_with(int d,
                                 std::vector<std::tuple<int, int, double>> entries) {
  SymmetricMatrix m(d);
  for (int i = 0; i < d; ++i) m.set(i, i, 1.0);
  for (auto [i, j, v] : entries) m.set(i, j, v);
  return m;
}

// The worked 4x4 path example: unit diagonal, entries 0.3, -0.4, 0.2 along
// the path 0-1-2-3.
inline SymmetricMatrix example_path4() {
  return unit_with(4, {{0, 1, 0.3}, {1, 2, -0.4}, {2, 3, 0.2}});
}

// Its inverse-consistent complement.
inline SymmetricMatrix example_path4_complement() {
  SymmetricMatrix n(4);
  n.set(0, 2, 0.3 * -0.4);          // -0.120
  n.set(0, 3, 0.3 * -0.4 * 0.2);    // -0.024
  n.set(1, 3, -0.4 * 0.2);          // -0.080
  return n;
}

// Its closed-form inverse (A = (M + N)^{-1}), entry by entry.
inline SymmetricMatrix example_path4_inverse() {
  SymmetricMatrix a(4);
  a.set(0, 0, 1.0 / 0.91);
  a.set(0, 1, -0.3 / 0.91);
  a.set(1, 1, 1.0 + 0.09 / 0.91 + 0.16 / 0.84);
  a.set(1, 2, 0.4 / 0.84);
  a.set(2, 2, 1.0 + 0.16 / 0.84 + 0.04 / 0.96);
  a.set(2, 3, -0.2 / 0.96);
  a.set(3, 3, 1.0 / 0.96);
  return a;
}

inline SupportGraph graph_from_edges(int n, std::vector<std::pair<int, int>> edges) {
  SparseSymmetricMatrix m(n);
  for (auto [u, v] : edges) m.push_offdiag(std::max(u, v), std::min(u, v), 1.0);
  m.finalize();
  return support_graph(m);
}

inline SupportGraph path_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return graph_from_edges(n, std::move(e));
}

inline SupportGraph cycle_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return graph_from_edges(n, std::move(e));
}

// Star on n vertices: center 0, leaves 1..n-1.
inline SupportGraph star_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) e.emplace_back(0, i);
  return graph_from_edges(n, std::move(e));
}

inline SupportGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return graph_from_edges(n, std::move(e));
}

// Random dense PD matrix: A A^T / d + I, well conditioned.
inline SymmetricMatrix random_pd(int d, SplitMix64& rng) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.gaussian();
  Eigen::MatrixXd m = a * a.transpose() / static_cast<double>(d) +
                      Eigen::MatrixXd::Identity(d, d);
  return SymmetricMatrix::from_dense((m + m.transpose()) / 2.0);
}

// Random unit-diagonal covariance whose residue at `lambda` is a uniformly
// random spanning tree with normalized residue magnitudes <= max_mag.
// Guarantees strict separation: off-tree entries are exactly zero.
inline CovarianceInput random_tree_covariance(int d, double lambda,
                                              double max_mag, SplitMix64& rng) {
  SymmetricMatrix m(d);
  for (int i = 0; i < d; ++i) m.set(i, i, 1.0);
  // Random tree: attach each vertex to a uniformly random earlier vertex.
  for (int v = 1; v < d; ++v) {
    const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
    const double mag = max_mag * (0.3 + 0.7 * rng.uniform01());
    const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    m.set(u, v, sign * (lambda + mag));
  }
  return CovarianceInput(std::move(m));
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  return max_abs_diff(a.dense(), b.dense());
}

inline double max_abs_diff(const SparseSymmetricMatrix& a,
                           const SparseSymmetricMatrix& b) {
  return max_abs_diff(a.to_dense(), b.to_dense());
}

// Exact support equality of two sparse estimates under cutoffs.
inline bool same_support(const SparseSymmetricMatrix& a,
                         const SparseSymmetricMatrix& b, double cut_a,
                         double cut_b) {
  const Eigen::MatrixXd da = a.to_dense(), db = b.to_dense();
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i + 1; j < a.dim(); ++j)
      if ((std::abs(da(i, j)) > cut_a) != (std::abs(db(i, j)) > cut_b))
        return false;
  return true;
}

}  // namespace glx::test
