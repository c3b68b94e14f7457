#include "gaan/margin.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <queue>

namespace gaan {

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::set<int> RingSystem::unit_vertices(int unit) const {
  std::set<int> out;
  for (std::size_t c = 0; c < cycles.size(); ++c)
    if (unit_id[c] == unit) out.insert(cycles[c].begin(), cycles[c].end());
  return out;
}

std::vector<int> RingSystem::unit_edges(const AttributedGraph& g, int unit) const {
  std::set<int> verts = unit_vertices(unit);
  std::vector<int> out;
  for (int e = 0; e < g.m(); ++e)
    if (verts.count(g.edges[e].first) && verts.count(g.edges[e].second)) out.push_back(e);
  return out;
}

std::set<int> cyclic_edge_ids(const AttributedGraph& g, const RingSystem& rings) {
  std::map<std::pair<int, int>, int> id_of;
  for (int e = 0; e < g.m(); ++e) id_of[g.edges[e]] = e;
  std::set<int> out;
  for (const auto& cyc : rings.cycles) {
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      int u = cyc[i];
      int v = cyc[(i + 1) % cyc.size()];
      out.insert(id_of.at({std::min(u, v), std::max(u, v)}));
    }
  }
  return out;
}

RingSystem find_cycle_basis(const AttributedGraph& g) {
  RingSystem rs;
  std::vector<int> parent(g.n, -1);       // parent vertex in the BFS forest
  std::vector<int> parent_edge(g.n, -1);  // edge to parent
  std::vector<int> depth(g.n, -1);
  std::vector<bool> tree_edge(g.m(), false);

  // BFS forest in vertex-id order for determinism
  for (int root = 0; root < g.n; ++root) {
    if (depth[root] >= 0) continue;
    depth[root] = 0;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int e : g.incident[u]) {
        int w = g.other_end(e, u);
        if (depth[w] < 0) {
          depth[w] = depth[u] + 1;
          parent[w] = u;
          parent_edge[w] = e;
          tree_edge[e] = true;
          q.push(w);
        }
      }
    }
  }

  // Each chord closes one fundamental cycle: both endpoints walk up to their
  // lowest common ancestor in the forest.
  for (int e = 0; e < g.m(); ++e) {
    if (tree_edge[e]) continue;
    int u = g.edges[e].first, v = g.edges[e].second;
    std::vector<int> up_u, up_v;
    int a = u, b = v;
    while (depth[a] > depth[b]) {
      up_u.push_back(a);
      a = parent[a];
    }
    while (depth[b] > depth[a]) {
      up_v.push_back(b);
      b = parent[b];
    }
    while (a != b) {
      up_u.push_back(a);
      up_v.push_back(b);
      a = parent[a];
      b = parent[b];
    }
    std::vector<int> cycle = up_u;
    cycle.push_back(a);  // the LCA
    cycle.insert(cycle.end(), up_v.rbegin(), up_v.rend());
    assert(cycle.size() >= 3);
    rs.cycles.push_back(std::move(cycle));
  }

  for (const auto& cyc : rs.cycles) rs.ring_vertices.insert(cyc.begin(), cyc.end());

  // Transitive closure of edge sharing: cycles listing the same edge merge.
  const int k = static_cast<int>(rs.cycles.size());
  DisjointSet ds(k);
  std::map<std::pair<int, int>, int> edge_owner;
  for (int c = 0; c < k; ++c) {
    const auto& cyc = rs.cycles[c];
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      int u = cyc[i], v = cyc[(i + 1) % cyc.size()];
      if (u > v) std::swap(u, v);
      auto [it, inserted] = edge_owner.try_emplace({u, v}, c);
      if (!inserted) ds.unite(c, it->second);
    }
  }
  rs.unit_id.assign(k, -1);
  std::map<int, int> root_to_unit;
  for (int c = 0; c < k; ++c) {
    int root = ds.find(c);
    auto [it, inserted] = root_to_unit.try_emplace(root, rs.unit_count);
    if (inserted) ++rs.unit_count;
    rs.unit_id[c] = it->second;
  }
  return rs;
}

MarginalStructure get_marginal_structure(const AttributedGraph& g, const RingSystem& rings) {
  MarginalStructure ms;
  for (int v = 0; v < g.n; ++v) {
    const int deg = static_cast<int>(g.incident[v].size());
    if (rings.ring_vertices.count(v)) {
      assert(deg >= 2);  // a cycle vertex cannot have degree 1
      if (deg == 2) ms.marginal_ring_vertices.insert(v);
    } else if (deg == 1) {
      ms.marginal_leaf_vertices.insert(v);
    }
  }
  for (int v : ms.marginal_leaf_vertices) ms.marginal_leaf_edges.insert(g.incident[v][0]);

  // Ring-marginal edges join two marginal ring vertices of the same unit.
  std::vector<std::set<int>> units;
  for (int u = 0; u < rings.unit_count; ++u) units.push_back(rings.unit_vertices(u));
  for (int e = 0; e < g.m(); ++e) {
    auto [a, b] = g.edges[e];
    if (!ms.marginal_ring_vertices.count(a) || !ms.marginal_ring_vertices.count(b)) continue;
    for (const auto& uv : units) {
      if (uv.count(a) && uv.count(b)) {
        ms.marginal_ring_edges.insert(e);
        break;
      }
    }
  }
  return ms;
}

}  // namespace gaan
