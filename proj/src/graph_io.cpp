#include "gaan/graph_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "gaan/error.hpp"

namespace gaan {

namespace {

using nlohmann::json;

json attrs_to_json(const VertexAttr& a) {
  return json{{"element", a.element},
              {"valence", a.valence},
              {"formal_charge", a.formal_charge},
              {"extra", a.extra}};
}

json attrs_to_json(const EdgeAttr& a) {
  return json{{"bond_order", bond_order_name(a.bond_order)}, {"in_ring", a.in_ring}};
}

VertexAttr vertex_attr_from_json(const json& j) {
  VertexAttr a;
  a.element = j.at("element").get<std::string>();
  a.valence = j.at("valence").get<int>();
  a.formal_charge = j.value("formal_charge", 0);
  if (j.contains("extra")) a.extra = j.at("extra").get<std::vector<std::string>>();
  return a;
}

EdgeAttr edge_attr_from_json(const json& j) {
  EdgeAttr a;
  a.bond_order = bond_order_from_name(j.at("bond_order").get<std::string>());
  a.in_ring = j.at("in_ring").get<bool>();
  return a;
}

}  // namespace

std::string graph_to_jsonl_line(const AttributedGraph& g, const std::vector<double>* labels) {
  json j;
  j["n"] = g.n;
  json edges = json::array();
  for (const auto& [u, v] : g.edges) edges.push_back(json::array({u, v}));
  j["edges"] = std::move(edges);
  json va = json::array();
  for (const auto& a : g.vertex_attrs) va.push_back(attrs_to_json(a));
  j["vertex_attrs"] = std::move(va);
  json ea = json::array();
  for (const auto& a : g.edge_attrs) ea.push_back(attrs_to_json(a));
  j["edge_attrs"] = std::move(ea);
  if (labels) {
    json ls = json::array();
    for (double v : *labels) {
      if (std::isnan(v)) {
        ls.push_back(nullptr);
      } else {
        ls.push_back(v);
      }
    }
    j["labels"] = std::move(ls);
  }
  return j.dump();
}

GraphRecord graph_from_jsonl_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(Error::Kind::ParseError, std::string("bad JSONL record: ") + e.what());
  }
  try {
    int n = j.at("n").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
      edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    std::vector<VertexAttr> vattrs;
    for (const auto& a : j.at("vertex_attrs")) vattrs.push_back(vertex_attr_from_json(a));
    std::vector<EdgeAttr> eattrs;
    for (const auto& a : j.at("edge_attrs")) eattrs.push_back(edge_attr_from_json(a));

    GraphRecord rec;
    rec.graph = build_graph(n, std::move(edges), std::move(vattrs), std::move(eattrs));
    if (j.contains("labels")) {
      rec.has_labels = true;
      for (const auto& v : j.at("labels")) {
        rec.labels.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                         : v.get<double>());
      }
    }
    return rec;
  } catch (const json::exception& e) {
    throw Error(Error::Kind::ParseError, std::string("bad JSONL record: ") + e.what());
  }
}

std::vector<GraphRecord> read_graph_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::IoError, "cannot open " + path);
  std::vector<GraphRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      records.push_back(graph_from_jsonl_line(line));
    } catch (const Error& e) {
      throw Error(e.kind(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_graph_jsonl(const std::string& path, const std::vector<GraphRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(Error::Kind::IoError, "cannot write " + path);
  for (const auto& rec : records) {
    out << graph_to_jsonl_line(rec.graph, rec.has_labels ? &rec.labels : nullptr) << '\n';
  }
}

}  // namespace gaan
