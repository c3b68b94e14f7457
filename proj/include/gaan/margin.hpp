#pragma once

#include <set>
#include <vector>

#include "gaan/graph.hpp"

namespace gaan {

// Fundamental cycle basis plus the grouping of edge-sharing cycles into
// collapse units. Recomputed from scratch on every folding iteration.
struct RingSystem {
  std::vector<std::vector<int>> cycles;  // each a closed walk of distinct vertex ids
  std::set<int> ring_vertices;           // union over all cycles
  std::vector<int> unit_id;              // per cycle; cycles sharing an edge share a unit
  int unit_count = 0;

  std::vector<int> unit_of_cycle() const { return unit_id; }
  // All vertices belonging to the given unit.
  std::set<int> unit_vertices(int unit) const;
  // Edge ids with both endpoints inside the unit.
  std::vector<int> unit_edges(const AttributedGraph& g, int unit) const;
  bool empty() const { return cycles.empty(); }
};

struct MarginalStructure {
  std::set<int> marginal_leaf_vertices;  // degree 1, not on any cycle
  std::set<int> marginal_leaf_edges;
  std::set<int> marginal_ring_vertices;  // degree 2, on a cycle
  std::set<int> marginal_ring_edges;     // both endpoints marginal in the same unit

  bool empty() const {
    return marginal_leaf_vertices.empty() && marginal_ring_vertices.empty();
  }
};

// Spanning-forest fundamental cycle basis: one cycle per non-tree edge, so
// |cycles| = m - n + (number of connected components).
RingSystem find_cycle_basis(const AttributedGraph& g);

// Edge ids lying on at least one basis cycle. Every edge on any cycle of the
// graph appears on a basis cycle, so this is exactly the non-bridge edge set.
std::set<int> cyclic_edge_ids(const AttributedGraph& g, const RingSystem& rings);

MarginalStructure get_marginal_structure(const AttributedGraph& g, const RingSystem& rings);

}  // namespace gaan
