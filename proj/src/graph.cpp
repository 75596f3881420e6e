#include "glx/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace glx {

bool SupportGraph::has_edge(int u, int v) const {
  const auto& n = adj[u];
  return std::binary_search(n.begin(), n.end(), v);
}

SupportGraph support_graph(const SparseSymmetricMatrix& m, double zero_tol) {
  SupportGraph g;
  g.num_vertices = m.dim();
  g.adj.assign(m.dim(), {});
  for (const auto& e : m.offdiag()) {
    if (std::abs(e.value) > zero_tol) {
      g.adj[e.i].push_back(e.j);
      g.adj[e.j].push_back(e.i);
      ++g.num_edges;
    }
  }
  for (auto& n : g.adj) std::sort(n.begin(), n.end());
  return g;
}

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

ComponentDecomposition decompose(const SupportGraph& g) {
  ComponentDecomposition c;
  c.component_of.assign(g.num_vertices, -1);
  std::deque<int> queue;
  for (int s = 0; s < g.num_vertices; ++s) {
    if (c.component_of[s] != -1) continue;
    const int id = static_cast<int>(c.vertices.size());
    c.vertices.emplace_back();
    c.component_of[s] = id;
    queue.push_back(s);
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      c.vertices[id].push_back(u);
      for (int v : g.adj[u]) {
        if (c.component_of[v] == -1) {
          c.component_of[v] = id;
          queue.push_back(v);
        }
      }
    }
    std::sort(c.vertices[id].begin(), c.vertices[id].end());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Girth: per-root BFS. Every shortest cycle is seen from each of its
// vertices, so the minimum over roots of the best closing edge is exact.
// ---------------------------------------------------------------------------

int girth(const SupportGraph& g) {
  const int d = g.num_vertices;
  int best = std::numeric_limits<int>::max();
  std::vector<int> dist(d), parent(d);
  std::deque<int> queue;
  for (int root = 0; root < d; ++root) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    dist[root] = 0;
    queue.clear();
    queue.push_back(root);
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (2 * dist[u] >= best) continue;  // no shorter cycle reachable
      for (int v : g.adj[u]) {
        if (dist[v] == -1) {
          dist[v] = dist[u] + 1;
          parent[v] = u;
          queue.push_back(v);
        } else if (v != parent[u] && dist[v] >= dist[u]) {
          // Non-tree edge closing a cycle through the root's BFS tree.
          best = std::min(best, dist[u] + dist[v] + 1);
        }
      }
    }
  }
  return best == std::numeric_limits<int>::max() ? 0 : best;
}

bool is_acyclic(const SupportGraph& g) {
  // Edge count per component: a component with v vertices is acyclic iff it
  // has exactly v - 1 edges; globally, edges == vertices - components.
  ComponentDecomposition c = decompose(g);
  return g.num_edges == g.num_vertices - c.num_components();
}

int max_degree(const SupportGraph& g) {
  int best = 0;
  for (const auto& n : g.adj) best = std::max<int>(best, n.size());
  return best;
}

// ---------------------------------------------------------------------------
// Simple-path counting
// ---------------------------------------------------------------------------

namespace {

struct PathCounter {
  const SupportGraph& g;
  std::int64_t cap;
  std::int64_t budget;  // total DFS visits allowed per source
  std::vector<std::int64_t> count;  // per target, for the current source
  std::vector<char> on_path;

  PathCounter(const SupportGraph& gg, std::int64_t cap_)
      : g(gg), cap(cap_), budget(0),
        count(gg.num_vertices, 0), on_path(gg.num_vertices, 0) {}

  void dfs(int u) {
    if (--budget < 0) throw PathCountOverflowError(cap);
    on_path[u] = 1;
    for (int v : g.adj[u]) {
      if (on_path[v]) continue;
      if (++count[v] > cap) throw PathCountOverflowError(cap);
      dfs(v);
    }
    on_path[u] = 0;
  }
};

}  // namespace

std::int64_t max_simple_paths(const SupportGraph& g, std::int64_t cap) {
  if (g.num_edges == 0) return 0;
  if (is_acyclic(g)) return 1;  // unique path between connected pairs
  std::int64_t best = 0;
  PathCounter pc(g, cap);
  pc.budget = 64 * cap;  // shared across sources: bounds total work
  for (int s = 0; s < g.num_vertices; ++s) {
    std::fill(pc.count.begin(), pc.count.end(), 0);
    pc.dfs(s);
    for (int t = 0; t < g.num_vertices; ++t)
      if (t != s) best = std::max(best, pc.count[t]);
  }
  return best;
}

CycleStats cycle_stats(const SupportGraph& g, std::int64_t cap) {
  CycleStats s;
  s.girth = girth(g);
  s.acyclic = (s.girth == 0);
  s.max_degree = max_degree(g);
  if (s.acyclic) {
    s.p_max = g.num_edges > 0 ? 1 : 0;
    return s;
  }
  try {
    s.p_max = max_simple_paths(g, cap);
  } catch (const PathCountOverflowError&) {
    s.p_max = cap;
    s.p_max_overflowed = true;
  }
  return s;
}

}  // namespace glx
