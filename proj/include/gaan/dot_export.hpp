#pragma once

#include <string>
#include <vector>

#include "gaan/fold.hpp"
#include "gaan/graph.hpp"
#include "gaan/margin.hpp"

namespace gaan {

// Graphviz rendering of one graph. Marginal vertices are drawn red; marginal
// edges dashed; ring-surrogate vertices use a double circle. members, when
// given, annotates each vertex with the base vertices it absorbed.
std::string graph_to_dot(const AttributedGraph& g, const MarginalStructure& ms,
                         const std::vector<HyperVertex>* members = nullptr,
                         const std::string& title = "G");

// JSON rendering of one pyramid level (structure, attributes, marginal sets,
// provenance map).
std::string level_to_json(const FoldingPyramid& p, int level);

std::string level_to_dot(const FoldingPyramid& p, int level);

// Writes one file per level: <prefix>.level<h>.<dot|json>. Returns the paths.
std::vector<std::string> write_pyramid_dumps(const FoldingPyramid& p, const std::string& prefix,
                                             const std::string& format);

}  // namespace gaan
