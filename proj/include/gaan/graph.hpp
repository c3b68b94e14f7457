#pragma once

#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "gaan/tensor.hpp"

namespace gaan {

enum class BondOrder { Single, Double, Triple, Aromatic };

std::string bond_order_name(BondOrder b);
BondOrder bond_order_from_name(const std::string& name);

struct VertexAttr {
  std::string element;
  int valence = 0;
  int formal_charge = 0;
  std::vector<std::string> extra;

  auto operator<=>(const VertexAttr&) const = default;
};

struct EdgeAttr {
  BondOrder bond_order = BondOrder::Single;
  bool in_ring = false;

  auto operator<=>(const EdgeAttr&) const = default;
};

// Element label reserved for the vertex that replaces a collapsed ring unit.
inline const std::string kRingSurrogateElement = "*ring*";

inline VertexAttr ring_surrogate_attr() { return VertexAttr{kRingSurrogateElement, 0, 0, {}}; }

// Undirected simple graph with dense 0-based vertex ids, per-element discrete
// attributes, and per-element dense feature rows. Immutable once built;
// transformations produce new graphs.
struct AttributedGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // normalized u < v
  std::vector<VertexAttr> vertex_attrs;
  std::vector<EdgeAttr> edge_attrs;
  Tensor x_v;  // n x d_V
  Tensor x_e;  // m x d_E
  std::vector<std::vector<int>> incident;  // vertex -> sorted incident edge ids

  int m() const { return static_cast<int>(edges.size()); }
  // The endpoint of edge e that is not v.
  int other_end(int e, int v) const {
    return edges[e].first == v ? edges[e].second : edges[e].first;
  }
};

// Frozen attribute alphabet. Group order: sorted distinct training tuples,
// then the ring-surrogate group (vertex side only), then a reserved unknown
// group at the last index. The unknown group stores no tuple; any tuple not
// registered maps to it.
struct AttributeSchema {
  std::vector<VertexAttr> vertex_groups;  // registered tuples, surrogate last
  std::vector<EdgeAttr> edge_groups;      // registered tuples

  static AttributeSchema build(const std::vector<AttributedGraph>& graphs);

  int p() const { return static_cast<int>(vertex_groups.size()) + 1; }
  int q() const { return static_cast<int>(edge_groups.size()) + 1; }
  int vertex_unknown_index() const { return p() - 1; }
  int edge_unknown_index() const { return q() - 1; }
  int vertex_group_of(const VertexAttr& a) const;
  int edge_group_of(const EdgeAttr& a) const;
};

AttributedGraph build_graph(int n, std::vector<std::pair<int, int>> edges,
                            std::vector<VertexAttr> vertex_attrs,
                            std::vector<EdgeAttr> edge_attrs);

int degree(const AttributedGraph& g, int v);

std::vector<int> incident_edges(const AttributedGraph& g, int v);

// One-hot features from the frozen schema: X_V rows are width p, X_E width q.
AttributedGraph initial_features(const AttributedGraph& g, const AttributeSchema& schema);

}  // namespace gaan
