#pragma once

// Support graphs of sparse symmetric matrices: connected components, girth,
// maximum simple-path counts, degrees. All graphs are simple and undirected.

#include "glx/numerics.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace glx {

struct PathCountOverflowError : std::runtime_error {
  explicit PathCountOverflowError(std::int64_t cap)
      : std::runtime_error("simple-path count exceeds cap"), cap(cap) {}
  std::int64_t cap;
};

// Adjacency-list graph over vertices 0..d-1.
struct SupportGraph {
  int num_vertices = 0;
  std::vector<std::vector<int>> adj;  // sorted neighbor lists
  std::int64_t num_edges = 0;

  bool has_edge(int u, int v) const;
};

// Vertices of the support graph of m: edge (i,j) iff stored |m_ij| > zero_tol,
// i != j. The diagonal never contributes edges.
SupportGraph support_graph(const SparseSymmetricMatrix& m,
                           double zero_tol = 0.0);

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

struct ComponentDecomposition {
  std::vector<int> component_of;           // vertex -> component id
  std::vector<std::vector<int>> vertices;  // component id -> sorted vertices
  int num_components() const { return static_cast<int>(vertices.size()); }
};

ComponentDecomposition decompose(const SupportGraph& g);

// ---------------------------------------------------------------------------
// Cycle statistics
// ---------------------------------------------------------------------------

// Exact girth via per-vertex BFS; 0 encodes "acyclic" (infinite girth).
int girth(const SupportGraph& g);

bool is_acyclic(const SupportGraph& g);

int max_degree(const SupportGraph& g);

inline constexpr std::int64_t kDefaultPathCap = 1'000'000;

// Maximum over vertex pairs of the number of simple paths connecting them.
// 0 for edgeless graphs, 1 on nonempty acyclic graphs. DFS enumeration from
// every source; aborts with PathCountOverflowError once any pair count
// exceeds `cap` or the shared total visit budget (64 * cap) is exhausted.
std::int64_t max_simple_paths(const SupportGraph& g,
                              std::int64_t cap = kDefaultPathCap);

// Bundled statistics for certificate construction. p_max_overflowed means the
// enumeration hit the cap and p_max is a lower bound, not the true value.
struct CycleStats {
  bool acyclic = true;
  int girth = 0;  // 0 = acyclic
  int max_degree = 0;
  std::int64_t p_max = 0;
  bool p_max_overflowed = false;
};

CycleStats cycle_stats(const SupportGraph& g,
                       std::int64_t cap = kDefaultPathCap);

}  // namespace glx
