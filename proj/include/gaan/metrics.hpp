#pragma once

#include <vector>

#include "gaan/dataset.hpp"
#include "gaan/tensor.hpp"

namespace gaan {

// Rank-based AUC with average ranks on ties. Missing labels (NaN) are
// skipped. Throws SingleClassTask when observed labels are all one class.
double roc_auc(const std::vector<double>& scores, const std::vector<double>& labels);

// Root of the mean squared error over observed entries; throws
// AllLabelsMissing when nothing is observed.
double rmse(const std::vector<double>& preds, const std::vector<double>& labels);

// Fraction of observed labels matched by thresholding the score at 0.5.
double accuracy(const std::vector<double>& scores, const std::vector<double>& labels);

struct TaskMetric {
  std::string task;
  std::string metric;  // "roc_auc" or "rmse"
  double value = 0.0;
  bool skipped = false;  // single-class task, excluded from the mean
};

struct MetricReport {
  std::vector<TaskMetric> per_task;
  double mean = 0.0;  // over non-skipped tasks
  std::string metric;
};

// Per-task metric columns: ROC-AUC for classification tasks, RMSE for
// regression tasks; the mean skips single-class tasks and records them.
// preds holds sigmoid probabilities for classification columns.
MetricReport evaluate_metrics(const Tensor& preds, const Tensor& labels,
                              const std::vector<TaskType>& task_types,
                              const std::vector<std::string>& task_names);

}  // namespace gaan
