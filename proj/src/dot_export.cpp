#include "gaan/dot_export.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gaan/error.hpp"

namespace gaan {

namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string graph_to_dot(const AttributedGraph& g, const MarginalStructure& ms,
                         const std::vector<HyperVertex>* members, const std::string& title) {
  std::set<int> marg_v(ms.marginal_leaf_vertices.begin(), ms.marginal_leaf_vertices.end());
  marg_v.insert(ms.marginal_ring_vertices.begin(), ms.marginal_ring_vertices.end());
  std::set<int> marg_e(ms.marginal_leaf_edges.begin(), ms.marginal_leaf_edges.end());
  marg_e.insert(ms.marginal_ring_edges.begin(), ms.marginal_ring_edges.end());

  std::ostringstream out;
  out << "graph \"" << escape_dot(title) << "\" {\n";
  out << "  node [shape=circle fontsize=10];\n";
  for (int v = 0; v < g.n; ++v) {
    const VertexAttr& a = g.vertex_attrs[v];
    out << "  v" << v << " [label=\"" << escape_dot(a.element) << " " << v << "\"";
    if (a.element == kRingSurrogateElement) out << " shape=doublecircle";
    if (marg_v.count(v)) out << " color=red fontcolor=red";
    if (members && v < static_cast<int>(members->size())) {
      out << " tooltip=\"base members: " << join_ids((*members)[v].members) << "\"";
    }
    out << "];\n";
  }
  for (int e = 0; e < g.m(); ++e) {
    out << "  v" << g.edges[e].first << " -- v" << g.edges[e].second;
    out << " [label=\"" << escape_dot(bond_order_name(g.edge_attrs[e].bond_order)) << "\"";
    if (marg_e.count(e)) out << " style=dashed color=red";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string level_to_dot(const FoldingPyramid& p, int level) {
  const FoldingLevel& lv = p.levels.at(level);
  return graph_to_dot(lv.graph, lv.marginal, &lv.hypermap, "level" + std::to_string(level));
}

std::string level_to_json(const FoldingPyramid& p, int level) {
  const FoldingLevel& lv = p.levels.at(level);
  const AttributedGraph& g = lv.graph;
  nlohmann::json j;
  j["level"] = level;
  j["n"] = g.n;
  j["fixpoint"] = lv.fixpoint;
  nlohmann::json verts = nlohmann::json::array();
  for (int v = 0; v < g.n; ++v) {
    nlohmann::json jv;
    jv["id"] = v;
    jv["element"] = g.vertex_attrs[v].element;
    jv["members"] = lv.hypermap[v].members;
    jv["born_level"] = lv.hypermap[v].born_level;
    verts.push_back(jv);
  }
  j["vertices"] = verts;
  nlohmann::json edges = nlohmann::json::array();
  for (int e = 0; e < g.m(); ++e) {
    nlohmann::json je;
    je["u"] = g.edges[e].first;
    je["v"] = g.edges[e].second;
    je["bond_order"] = bond_order_name(g.edge_attrs[e].bond_order);
    je["in_ring"] = g.edge_attrs[e].in_ring;
    edges.push_back(je);
  }
  j["edges"] = edges;
  j["marginal"] = {{"leaf_vertices", lv.marginal.marginal_leaf_vertices},
                   {"leaf_edges", lv.marginal.marginal_leaf_edges},
                   {"ring_vertices", lv.marginal.marginal_ring_vertices},
                   {"ring_edges", lv.marginal.marginal_ring_edges}};
  return j.dump(2) + "\n";
}

std::vector<std::string> write_pyramid_dumps(const FoldingPyramid& p, const std::string& prefix,
                                             const std::string& format) {
  if (format != "dot" && format != "json") {
    throw Error(Error::Kind::ConfigError, "unknown dump format '" + format + "' (expected dot or json)");
  }
  std::vector<std::string> paths;
  for (int h = 0; h < isize(p.levels); ++h) {
    const std::string path = prefix + ".level" + std::to_string(h) + "." + format;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Error::Kind::IoError, "cannot write dump file: " + path);
    out << (format == "dot" ? level_to_dot(p, h) : level_to_json(p, h));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace gaan
