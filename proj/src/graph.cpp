#include "gaan/graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gaan/error.hpp"

namespace gaan {

std::string bond_order_name(BondOrder b) {
  switch (b) {
    case BondOrder::Single: return "single";
    case BondOrder::Double: return "double";
    case BondOrder::Triple: return "triple";
    case BondOrder::Aromatic: return "aromatic";
  }
  return "single";
}

BondOrder bond_order_from_name(const std::string& name) {
  if (name == "single") return BondOrder::Single;
  if (name == "double") return BondOrder::Double;
  if (name == "triple") return BondOrder::Triple;
  if (name == "aromatic") return BondOrder::Aromatic;
  throw Error(Error::Kind::ParseError, "unknown bond order '" + name + "'");
}

AttributedGraph build_graph(int n, std::vector<std::pair<int, int>> edges,
                            std::vector<VertexAttr> vertex_attrs,
                            std::vector<EdgeAttr> edge_attrs) {
  AttributedGraph g;
  g.n = n;
  std::set<std::pair<int, int>> seen;
  for (auto& [u, v] : edges) {
    if (u == v)
      throw Error(Error::Kind::SelfLoop, "self-loop at vertex " + std::to_string(u));
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw Error(Error::Kind::EndpointOutOfRange,
                  "edge (" + std::to_string(u) + "," + std::to_string(v) + ") exceeds vertex count " +
                      std::to_string(n));
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second)
      throw Error(Error::Kind::DuplicateEdge,
                  "duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  if (!vertex_attrs.empty() && static_cast<int>(vertex_attrs.size()) != n)
    throw Error(Error::Kind::RowCountMismatch, "vertex attribute count != n");
  if (!edge_attrs.empty() && edge_attrs.size() != edges.size())
    throw Error(Error::Kind::RowCountMismatch, "edge attribute count != m");
  if (vertex_attrs.empty()) vertex_attrs.resize(n);
  if (edge_attrs.empty()) edge_attrs.resize(edges.size());

  g.edges = std::move(edges);
  g.vertex_attrs = std::move(vertex_attrs);
  g.edge_attrs = std::move(edge_attrs);
  g.incident.assign(n, {});
  for (int e = 0; e < g.m(); ++e) {
    g.incident[g.edges[e].first].push_back(e);
    g.incident[g.edges[e].second].push_back(e);
  }
  g.x_v = Tensor(n, 0);
  g.x_e = Tensor(g.m(), 0);
  return g;
}

int degree(const AttributedGraph& g, int v) {
  if (v < 0 || v >= g.n)
    throw Error(Error::Kind::EndpointOutOfRange, "degree: vertex " + std::to_string(v));
  return static_cast<int>(g.incident[v].size());
}

std::vector<int> incident_edges(const AttributedGraph& g, int v) {
  if (v < 0 || v >= g.n)
    throw Error(Error::Kind::EndpointOutOfRange, "incident_edges: vertex " + std::to_string(v));
  return g.incident[v];
}

AttributeSchema AttributeSchema::build(const std::vector<AttributedGraph>& graphs) {
  std::set<VertexAttr> vset;
  std::set<EdgeAttr> eset;
  for (const auto& g : graphs) {
    vset.insert(g.vertex_attrs.begin(), g.vertex_attrs.end());
    eset.insert(g.edge_attrs.begin(), g.edge_attrs.end());
  }
  vset.erase(ring_surrogate_attr());
  AttributeSchema s;
  s.vertex_groups.assign(vset.begin(), vset.end());
  s.vertex_groups.push_back(ring_surrogate_attr());
  s.edge_groups.assign(eset.begin(), eset.end());
  return s;
}

int AttributeSchema::vertex_group_of(const VertexAttr& a) const {
  // linear scan; alphabets are small and built once
  for (std::size_t i = 0; i < vertex_groups.size(); ++i)
    if (vertex_groups[i] == a) return static_cast<int>(i);
  return vertex_unknown_index();
}

int AttributeSchema::edge_group_of(const EdgeAttr& a) const {
  for (std::size_t i = 0; i < edge_groups.size(); ++i)
    if (edge_groups[i] == a) return static_cast<int>(i);
  return edge_unknown_index();
}

AttributedGraph initial_features(const AttributedGraph& g, const AttributeSchema& schema) {
  AttributedGraph out = g;
  out.x_v = Tensor(g.n, schema.p());
  for (int v = 0; v < g.n; ++v) out.x_v.at(v, schema.vertex_group_of(g.vertex_attrs[v])) = 1.0;
  out.x_e = Tensor(g.m(), schema.q());
  for (int e = 0; e < g.m(); ++e) out.x_e.at(e, schema.edge_group_of(g.edge_attrs[e])) = 1.0;
  return out;
}

}  // namespace gaan
