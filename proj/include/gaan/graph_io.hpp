#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaan/graph.hpp"

namespace gaan {

// One graph record of the JSONL interchange format. Missing labels are NaN
// in memory and null on disk; a record may carry no labels at all.
struct GraphRecord {
  AttributedGraph graph;
  std::vector<double> labels;
  bool has_labels = false;
};

std::string graph_to_jsonl_line(const AttributedGraph& g, const std::vector<double>* labels);
GraphRecord graph_from_jsonl_line(const std::string& line);

std::vector<GraphRecord> read_graph_jsonl(const std::string& path);
void write_graph_jsonl(const std::string& path, const std::vector<GraphRecord>& records);

}  // namespace gaan
