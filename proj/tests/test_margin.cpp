#include <algorithm>
#include <queue>
#include <random>
#include <set>

#include <doctest.h>

#include "gaan/margin.hpp"
#include "test_util.hpp"

using namespace gaan;
using namespace gaan::testutil;

namespace {

// Brute-force oracle: an edge lies on a cycle iff its endpoints stay
// connected after the edge is removed.
bool on_cycle_brute(const AttributedGraph& g, int e) {
  std::vector<int> seen(g.n, 0);
  std::queue<int> q;
  q.push(g.edges[e].first);
  seen[g.edges[e].first] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int ie : g.incident[v]) {
      if (ie == e) continue;
      int w = g.other_end(ie, v);
      if (!seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  return seen[g.edges[e].second] != 0;
}

}  // namespace

TEST_CASE("cycle basis size equals m - n + components") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 120; ++trial) {
    int n = 2 + static_cast<int>(rng() % 14);
    AttributedGraph g = random_connected_graph(rng, n, static_cast<int>(rng() % 8));
    RingSystem rings = find_cycle_basis(g);
    int c = component_count(g);
    CHECK(static_cast<int>(rings.cycles.size()) == g.m() - g.n + c);
  }
  // acyclic graphs have an empty basis
  CHECK(find_cycle_basis(path_graph(6)).empty());
  CHECK(find_cycle_basis(star_graph(7)).empty());
}

TEST_CASE("cyclic edges are exactly the non-bridge edges") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 3 + static_cast<int>(rng() % 12);
    AttributedGraph g = random_connected_graph(rng, n, static_cast<int>(rng() % 6));
    RingSystem rings = find_cycle_basis(g);
    std::set<int> cyc = cyclic_edge_ids(g, rings);
    for (int e = 0; e < g.m(); ++e) {
      INFO("trial ", trial, " edge ", e);
      CHECK(cyc.count(e) == (on_cycle_brute(g, e) ? 1u : 0u));
    }
  }
}

TEST_CASE("edge-sharing cycles merge into units") {
  // naphthalene skeleton: two hexagons sharing edge (0,1)
  AttributedGraph naphthalene = from_edges(
      10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}, {1, 6}, {6, 7}, {7, 8}, {8, 9}, {0, 9}});
  RingSystem r1 = find_cycle_basis(naphthalene);
  CHECK(r1.cycles.size() == 2);
  CHECK(r1.unit_count == 1);

  // spiro: two triangles sharing only vertex 0 -> separate units
  AttributedGraph spiro = from_edges(5, {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {3, 4}, {0, 4}});
  RingSystem r2 = find_cycle_basis(spiro);
  CHECK(r2.cycles.size() == 2);
  CHECK(r2.unit_count == 2);

  // disjoint rings joined by a path -> separate units
  AttributedGraph dumbbell =
      from_edges(7, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {4, 6}});
  RingSystem r3 = find_cycle_basis(dumbbell);
  CHECK(r3.cycles.size() == 2);
  CHECK(r3.unit_count == 2);
  CHECK(r3.unit_vertices(r3.unit_id[0]) != r3.unit_vertices(r3.unit_id[1]));
}

TEST_CASE("marginal classification on canonical shapes") {
  SUBCASE("path: the two endpoints are marginal leaves") {
    AttributedGraph g = path_graph(5);
    MarginalStructure ms = get_marginal_structure(g, find_cycle_basis(g));
    CHECK(ms.marginal_leaf_vertices == std::set<int>{0, 4});
    CHECK(ms.marginal_leaf_edges == std::set<int>{0, 3});
    CHECK(ms.marginal_ring_vertices.empty());
  }

  SUBCASE("pure cycle: every vertex and edge is ring-marginal") {
    AttributedGraph g = cycle_graph(6);
    MarginalStructure ms = get_marginal_structure(g, find_cycle_basis(g));
    CHECK(ms.marginal_leaf_vertices.empty());
    CHECK(ms.marginal_ring_vertices.size() == 6);
    CHECK(ms.marginal_ring_edges.size() == 6);
  }

  SUBCASE("toluene skeleton: one leaf, five ring-marginal vertices") {
    // benzene ring 0..5 with methyl 6 on vertex 0
    AttributedGraph g = ring_with_pendant();
    MarginalStructure ms = get_marginal_structure(g, find_cycle_basis(g));
    CHECK(ms.marginal_leaf_vertices == std::set<int>{6});
    CHECK(ms.marginal_ring_vertices == std::set<int>{1, 2, 3, 4, 5});
    // ring edges between two marginal ring vertices: (1,2),(2,3),(3,4),(4,5)
    CHECK(ms.marginal_ring_edges.size() == 4);
    for (int e : ms.marginal_ring_edges) {
      CHECK(ms.marginal_ring_vertices.count(g.edges[e].first) == 1);
      CHECK(ms.marginal_ring_vertices.count(g.edges[e].second) == 1);
    }
  }

  SUBCASE("degree-2 vertex off a ring is not marginal") {
    // triangle 0-1-2 with path 2-3-4: vertex 3 has degree 2 but no ring
    AttributedGraph g = from_edges(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}});
    MarginalStructure ms = get_marginal_structure(g, find_cycle_basis(g));
    CHECK(ms.marginal_leaf_vertices == std::set<int>{4});
    CHECK(ms.marginal_ring_vertices == std::set<int>{0, 1});
    CHECK(ms.marginal_ring_vertices.count(3) == 0);
  }

  SUBCASE("marginal sets are recomputed per graph, not cached") {
    AttributedGraph g = path_graph(3);
    MarginalStructure ms = get_marginal_structure(g, find_cycle_basis(g));
    CHECK(ms.marginal_leaf_vertices == std::set<int>{0, 2});
  }
}

TEST_CASE("marginal structure is label-symmetric") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 4 + static_cast<int>(rng() % 10);
    AttributedGraph g = random_connected_graph(rng, n, static_cast<int>(rng() % 5));
    std::vector<int> perm = random_permutation(rng, n);
    AttributedGraph h = permute_graph(g, perm);

    MarginalStructure mg = get_marginal_structure(g, find_cycle_basis(g));
    MarginalStructure mh = get_marginal_structure(h, find_cycle_basis(h));

    std::set<int> mapped_leaves, mapped_ring;
    for (int v : mg.marginal_leaf_vertices) mapped_leaves.insert(perm[v]);
    for (int v : mg.marginal_ring_vertices) mapped_ring.insert(perm[v]);
    CHECK(mapped_leaves == mh.marginal_leaf_vertices);
    CHECK(mapped_ring == mh.marginal_ring_vertices);
    CHECK(mg.marginal_ring_edges.size() == mh.marginal_ring_edges.size());
  }
}
