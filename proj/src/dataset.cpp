#include "gaan/dataset.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "gaan/error.hpp"

namespace gaan {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_label_cell(const std::string& raw, const std::string& where) {
  std::string cell = trim(raw);
  if (cell.empty() || cell == "nan" || cell == "NaN" || cell == "NA") return kMissing;
  try {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw Error(Error::Kind::ParseError, where + ": bad numeric cell '" + cell + "'");
  }
}

}  // namespace

std::string task_type_name(TaskType t) {
  return t == TaskType::Classification ? "classification" : "regression";
}

void attach_label_csv(std::vector<GraphRecord>& records, const std::string& label_path,
                      std::vector<std::string>* task_names) {
  std::ifstream in(label_path);
  if (!in) throw Error(Error::Kind::IoError, "cannot open " + label_path);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(Error::Kind::ParseError, label_path + ": empty label file");
  }
  std::vector<std::string> header = split_csv_line(trim(line));
  if (header.empty() || trim(header[0]) != "id") {
    throw Error(Error::Kind::ParseError, label_path + ": header must start with 'id'");
  }
  const int tasks = static_cast<int>(header.size()) - 1;
  if (tasks < 1) throw Error(Error::Kind::ParseError, label_path + ": no task columns");
  if (task_names) {
    task_names->clear();
    for (int t = 0; t < tasks; ++t) task_names->push_back(trim(header[t + 1]));
  }

  for (auto& rec : records) {
    rec.has_labels = true;
    rec.labels.assign(tasks, kMissing);
  }

  std::set<int> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = label_path + ":" + std::to_string(line_no);
    std::vector<std::string> cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != tasks + 1) {
      throw Error(Error::Kind::ParseError, where + ": expected " + std::to_string(tasks + 1) +
                                               " cells, got " + std::to_string(cells.size()));
    }
    int id = 0;
    try {
      id = std::stoi(trim(cells[0]));
    } catch (const std::exception&) {
      throw Error(Error::Kind::ParseError, where + ": bad id '" + cells[0] + "'");
    }
    if (id < 0 || id >= static_cast<int>(records.size())) {
      throw Error(Error::Kind::RowCountMismatch,
                  where + ": id " + std::to_string(id) + " out of range");
    }
    if (!seen.insert(id).second) {
      throw Error(Error::Kind::ParseError, where + ": duplicate id " + std::to_string(id));
    }
    for (int t = 0; t < tasks; ++t) {
      records[id].labels[t] = parse_label_cell(cells[t + 1], where);
    }
  }
  if (seen.size() != records.size()) {
    throw Error(Error::Kind::RowCountMismatch,
                label_path + ": " + std::to_string(seen.size()) + " label rows for " +
                    std::to_string(records.size()) + " graphs");
  }
}

std::vector<TaskType> infer_task_types(const Tensor& labels) {
  std::vector<TaskType> types(labels.cols(), TaskType::Classification);
  for (int t = 0; t < labels.cols(); ++t) {
    for (int i = 0; i < labels.rows(); ++i) {
      double v = labels.at(i, t);
      if (!std::isnan(v) && v != 0.0 && v != 1.0) {
        types[t] = TaskType::Regression;
        break;
      }
    }
  }
  return types;
}

Dataset dataset_from_records(const std::vector<GraphRecord>& records,
                             std::vector<std::string> task_names) {
  Dataset ds;
  int tasks = -1;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].has_labels) continue;
    const int width = static_cast<int>(records[i].labels.size());
    if (tasks < 0) {
      tasks = width;
    } else if (tasks != width) {
      throw Error(Error::Kind::RowCountMismatch,
                  "record " + std::to_string(i) + " has " + std::to_string(width) +
                      " labels, expected " + std::to_string(tasks));
    }
  }
  if (tasks <= 0) {
    throw Error(Error::Kind::AllLabelsMissing, "dataset carries no labels");
  }
  ds.labels = Tensor(static_cast<int>(records.size()), tasks);
  ds.labels.fill(kMissing);
  for (std::size_t i = 0; i < records.size(); ++i) {
    ds.graphs.push_back(records[i].graph);
    if (!records[i].has_labels) continue;
    for (int t = 0; t < tasks; ++t) ds.labels.at(static_cast<int>(i), t) = records[i].labels[t];
  }
  for (int t = 0; t < tasks; ++t) {
    bool any = false;
    for (int i = 0; i < ds.size() && !any; ++i) any = !std::isnan(ds.labels.at(i, t));
    if (!any) {
      throw Error(Error::Kind::AllLabelsMissing,
                  "task " + std::to_string(t) + " has no observed labels");
    }
  }
  ds.task_types = infer_task_types(ds.labels);
  if (task_names.empty()) {
    for (int t = 0; t < tasks; ++t) task_names.push_back("task" + std::to_string(t + 1));
  }
  if (static_cast<int>(task_names.size()) != tasks) {
    throw Error(Error::Kind::RowCountMismatch, "task name count does not match task count");
  }
  ds.task_names = std::move(task_names);
  return ds;
}

namespace {

Dataset take_subset(const Dataset& full, const std::vector<int>& idx, int begin, int end) {
  Dataset out;
  out.task_types = full.task_types;
  out.task_names = full.task_names;
  out.labels = Tensor(end - begin, full.tasks());
  for (int i = begin; i < end; ++i) {
    out.graphs.push_back(full.graphs[idx[i]]);
    for (int t = 0; t < full.tasks(); ++t) out.labels.at(i - begin, t) = full.labels.at(idx[i], t);
  }
  return out;
}

}  // namespace

DatasetSplits split_dataset(const Dataset& full, std::uint64_t seed) {
  const int n = full.size();
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  // Fisher-Yates driven directly by mt19937_64 output so the permutation is
  // identical on every platform (std::shuffle's draw sequence is not).
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[i], idx[j]);
  }
  const int train_end = n * 8 / 10;  // floor(0.8 n)
  const int valid_end = n * 9 / 10;  // floor(0.9 n)
  DatasetSplits splits;
  splits.train = take_subset(full, idx, 0, train_end);
  splits.valid = take_subset(full, idx, train_end, valid_end);
  splits.test = take_subset(full, idx, valid_end, n);
  return splits;
}

DatasetSplits load_dataset(const std::string& graph_path, const std::string& label_path,
                           std::uint64_t split_seed) {
  std::vector<GraphRecord> records = read_graph_jsonl(graph_path);
  std::vector<std::string> task_names;
  if (!label_path.empty()) attach_label_csv(records, label_path, &task_names);
  Dataset full = dataset_from_records(records, std::move(task_names));
  return split_dataset(full, split_seed);
}

}  // namespace gaan
