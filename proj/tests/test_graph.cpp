#include <doctest.h>

#include "gaan/error.hpp"
#include "gaan/graph.hpp"
#include "test_util.hpp"

using namespace gaan;
using namespace gaan::testutil;

TEST_CASE("build_graph validates structure") {
  CHECK_THROWS_AS(from_edges(3, {{0, 0}}), Error);                  // self loop
  CHECK_THROWS_AS(from_edges(3, {{0, 1}, {1, 0}}), Error);          // duplicate
  CHECK_THROWS_AS(from_edges(3, {{0, 3}}), Error);                  // out of range
  CHECK_THROWS_AS(build_graph(2, {{0, 1}}, {VertexAttr{}}, {}), Error);  // attr count

  AttributedGraph g = from_edges(4, {{2, 1}, {0, 3}});
  CHECK(g.edges[0] == std::pair<int, int>{1, 2});  // normalized u < v
  CHECK(g.m() == 2);
  CHECK(degree(g, 1) == 1);
  CHECK(g.other_end(0, 1) == 2);
  CHECK(incident_edges(g, 3) == std::vector<int>{1});
}

TEST_CASE("attribute schema grouping") {
  AttributedGraph a = build_graph(
      3, {{0, 1}, {1, 2}},
      {VertexAttr{"C", 1, 0, {}}, VertexAttr{"C", 2, 0, {}}, VertexAttr{"O", 1, 0, {}}},
      {EdgeAttr{BondOrder::Single, false}, EdgeAttr{BondOrder::Double, false}});
  AttributeSchema schema = AttributeSchema::build({a});

  // 3 distinct vertex tuples + surrogate group + unknown slot
  CHECK(schema.p() == 5);
  CHECK(schema.q() == 3);
  CHECK(schema.vertex_groups.back().element == kRingSurrogateElement);

  CHECK(schema.vertex_group_of(VertexAttr{"C", 1, 0, {}}) !=
        schema.vertex_group_of(VertexAttr{"C", 2, 0, {}}));
  CHECK(schema.vertex_group_of(VertexAttr{"N", 3, 0, {}}) == schema.vertex_unknown_index());
  CHECK(schema.edge_group_of(EdgeAttr{BondOrder::Triple, true}) == schema.edge_unknown_index());
  CHECK(schema.vertex_group_of(ring_surrogate_attr()) ==
        static_cast<int>(schema.vertex_groups.size()) - 1);
}

TEST_CASE("initial features are schema one-hots") {
  AttributedGraph a = path_graph(3);  // carbons with valences 1,2,1
  AttributeSchema schema = AttributeSchema::build({a});
  AttributedGraph f = initial_features(a, schema);
  CHECK(f.x_v.rows() == 3);
  CHECK(f.x_v.cols() == schema.p());
  CHECK(f.x_e.cols() == schema.q());
  for (int v = 0; v < f.n; ++v) {
    double sum = 0.0;
    for (int c = 0; c < f.x_v.cols(); ++c) sum += f.x_v.at(v, c);
    CHECK(sum == 1.0);
    CHECK(f.x_v.at(v, schema.vertex_group_of(a.vertex_attrs[v])) == 1.0);
  }
  // endpoints share a tuple, the middle vertex differs
  CHECK(max_abs_diff(Tensor::from_rows({{f.x_v.at(0, 0)}}),
                     Tensor::from_rows({{f.x_v.at(2, 0)}})) == 0.0);
}

TEST_CASE("bond order names round trip") {
  for (BondOrder b :
       {BondOrder::Single, BondOrder::Double, BondOrder::Triple, BondOrder::Aromatic}) {
    CHECK(bond_order_from_name(bond_order_name(b)) == b);
  }
  CHECK_THROWS_AS(bond_order_from_name("quadruple"), Error);
}
