#include "gaan/smiles.hpp"

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "gaan/error.hpp"
#include "gaan/margin.hpp"

namespace gaan {

namespace {

struct RawBond {
  int u = 0;
  int v = 0;
  int order = 0;  // 1/2/3 explicit, 0 implicit
};

int bond_order_excess(BondOrder o) {
  switch (o) {
    case BondOrder::Double:
      return 1;
    case BondOrder::Triple:
      return 2;
    default:
      return 0;  // single, and aromatic bonds are never declared
  }
}

}  // namespace

AttributedGraph parse_smiles(const std::string& s) {
  std::vector<std::string> elements;
  std::vector<bool> aromatic_atom;
  std::vector<RawBond> bonds;
  std::set<std::pair<int, int>> seen_pairs;
  std::vector<std::pair<int, std::size_t>> branch_stack;  // (attach atom, '(' offset)

  struct OpenRing {
    int atom = 0;
    int order = 0;
    std::size_t offset = 0;
  };
  std::map<char, OpenRing> open_rings;

  int prev = -1;
  int pending_order = 0;
  std::size_t pending_offset = 0;

  auto add_bond = [&](int u, int v, int order, std::size_t offset) {
    if (u == v) throw SmilesError(SmilesError::Kind::UnsupportedSymbol, offset,
                                  "ring closure bonds an atom to itself");
    auto pair = std::minmax(u, v);
    if (!seen_pairs.insert({pair.first, pair.second}).second) {
      throw SmilesError(SmilesError::Kind::UnsupportedSymbol, offset,
                        "duplicate bond between the same atoms");
    }
    bonds.push_back({u, v, order});
  };

  auto add_atom = [&](const std::string& element, bool aromatic, std::size_t offset) {
    int id = static_cast<int>(elements.size());
    elements.push_back(element);
    aromatic_atom.push_back(aromatic);
    if (prev >= 0) add_bond(prev, id, pending_order, offset);
    pending_order = 0;
    prev = id;
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == 'C' && i + 1 < s.size() && s[i + 1] == 'l') {
      add_atom("Cl", false, i);
      ++i;
    } else if (c == 'B' && i + 1 < s.size() && s[i + 1] == 'r') {
      add_atom("Br", false, i);
      ++i;
    } else if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'P' || c == 'S' ||
               c == 'F' || c == 'I') {
      add_atom(std::string(1, c), false, i);
    } else if (c == 'c' || c == 'n' || c == 'o' || c == 's') {
      add_atom(std::string(1, static_cast<char>(c - 'a' + 'A')), true, i);
    } else if (c == '-' || c == '=' || c == '#') {
      if (pending_order != 0) {
        throw SmilesError(SmilesError::Kind::UnsupportedSymbol, i, "two bond symbols in a row");
      }
      pending_order = c == '-' ? 1 : c == '=' ? 2 : 3;
      pending_offset = i;
    } else if (c == '(') {
      if (prev < 0) {
        throw SmilesError(SmilesError::Kind::UnbalancedParenthesis, i,
                          "branch opened with no preceding atom");
      }
      if (pending_order != 0) {
        throw SmilesError(SmilesError::Kind::UnsupportedSymbol, pending_offset,
                          "bond symbol before a branch");
      }
      branch_stack.emplace_back(prev, i);
    } else if (c == ')') {
      if (branch_stack.empty()) {
        throw SmilesError(SmilesError::Kind::UnbalancedParenthesis, i,
                          "closing parenthesis with no open branch");
      }
      if (pending_order != 0) {
        throw SmilesError(SmilesError::Kind::UnsupportedSymbol, pending_offset,
                          "bond symbol before a closing parenthesis");
      }
      prev = branch_stack.back().first;
      branch_stack.pop_back();
    } else if (c >= '1' && c <= '9') {
      if (prev < 0) {
        throw SmilesError(SmilesError::Kind::UnsupportedSymbol, i,
                          "ring closure with no preceding atom");
      }
      auto it = open_rings.find(c);
      if (it == open_rings.end()) {
        open_rings[c] = {prev, pending_order, i};
      } else {
        OpenRing open = it->second;
        open_rings.erase(it);
        int order = pending_order;
        if (open.order != 0) {
          if (order != 0 && order != open.order) {
            throw SmilesError(SmilesError::Kind::UnsupportedSymbol, i,
                              "conflicting bond orders on a ring closure");
          }
          order = open.order;
        }
        add_bond(open.atom, prev, order, i);
      }
      pending_order = 0;
    } else {
      throw SmilesError(SmilesError::Kind::UnsupportedSymbol, i,
                        std::string("unsupported character '") + c + "'");
    }
  }

  if (!open_rings.empty()) {
    const OpenRing& first = open_rings.begin()->second;
    throw SmilesError(SmilesError::Kind::UnmatchedRingClosure, first.offset,
                      std::string("ring closure digit '") + open_rings.begin()->first +
                          "' is never paired");
  }
  if (!branch_stack.empty()) {
    throw SmilesError(SmilesError::Kind::UnbalancedParenthesis, branch_stack.back().second,
                      "branch is never closed");
  }
  if (pending_order != 0) {
    throw SmilesError(SmilesError::Kind::UnsupportedSymbol, pending_offset,
                      "bond symbol with nothing after it");
  }
  if (elements.empty()) {
    throw SmilesError(SmilesError::Kind::UnsupportedSymbol, 0, "empty SMILES string");
  }

  const int n = static_cast<int>(elements.size());
  std::vector<std::pair<int, int>> edges;
  std::vector<EdgeAttr> edge_attrs;
  for (const RawBond& b : bonds) {
    edges.emplace_back(b.u, b.v);
    BondOrder order = b.order == 2 ? BondOrder::Double
                      : b.order == 3 ? BondOrder::Triple
                                     : BondOrder::Single;
    edge_attrs.push_back({order, false});
  }
  std::vector<VertexAttr> vertex_attrs(n);
  for (int v = 0; v < n; ++v) vertex_attrs[v].element = elements[v];

  AttributedGraph g = build_graph(n, edges, vertex_attrs, edge_attrs);

  RingSystem rings = find_cycle_basis(g);
  std::set<int> in_ring = cyclic_edge_ids(g, rings);
  for (int e : in_ring) g.edge_attrs[e].in_ring = true;
  // An undeclared ring bond between two aromatic atoms is aromatic.
  for (int e = 0; e < g.m(); ++e) {
    const RawBond& b = bonds[e];
    if (b.order == 0 && g.edge_attrs[e].in_ring && aromatic_atom[b.u] && aromatic_atom[b.v]) {
      g.edge_attrs[e].bond_order = BondOrder::Aromatic;
    }
  }
  for (int v = 0; v < n; ++v) {
    int valence = degree(g, v);
    for (int e : g.incident[v]) valence += bond_order_excess(g.edge_attrs[e].bond_order);
    g.vertex_attrs[v].valence = valence;
  }
  return g;
}

}  // namespace gaan
