#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaan/graph.hpp"
#include "gaan/graph_io.hpp"

namespace gaan {

enum class TaskType { Classification, Regression };

std::string task_type_name(TaskType t);

struct Dataset {
  std::vector<AttributedGraph> graphs;
  Tensor labels;  // size() x tasks(), NaN marks a missing label
  std::vector<TaskType> task_types;
  std::vector<std::string> task_names;

  int size() const { return static_cast<int>(graphs.size()); }
  int tasks() const { return labels.cols(); }
};

struct DatasetSplits {
  Dataset train;
  Dataset valid;
  Dataset test;
};

// Attaches labels from a CSV with header `id,task1,...,taskT`; ids are the
// 0-based positions of the graphs in the JSONL file. Row count must match
// the record count exactly.
void attach_label_csv(std::vector<GraphRecord>& records, const std::string& label_path,
                      std::vector<std::string>* task_names);

// A task whose observed labels are all 0 or 1 is a classification task.
std::vector<TaskType> infer_task_types(const Tensor& labels);

// Validates label coverage (every task needs at least one observed value)
// and infers task types.
Dataset dataset_from_records(const std::vector<GraphRecord>& records,
                             std::vector<std::string> task_names);

// Deterministic seeded shuffle, then 8:1:1 split by position:
// train = floor(0.8 n), valid = floor(0.9 n) - floor(0.8 n), test = rest.
DatasetSplits split_dataset(const Dataset& full, std::uint64_t seed);

// JSONL graphs plus optional CSV labels (empty path = labels from JSONL).
DatasetSplits load_dataset(const std::string& graph_path, const std::string& label_path,
                           std::uint64_t split_seed);

}  // namespace gaan
