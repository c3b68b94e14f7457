#include "gaan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaan/error.hpp"

namespace gaan {

double roc_auc(const std::vector<double>& scores, const std::vector<double>& labels) {
  std::vector<int> obs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isnan(labels[i])) obs.push_back(static_cast<int>(i));
  }
  int positives = 0;
  for (int i : obs) positives += labels[i] == 1.0 ? 1 : 0;
  const int negatives = static_cast<int>(obs.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(Error::Kind::SingleClassTask, "observed labels are all one class");
  }

  // Mann-Whitney U via average ranks of the positive scores.
  std::sort(obs.begin(), obs.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });
  std::vector<double> rank(obs.size());
  for (std::size_t i = 0; i < obs.size();) {
    std::size_t j = i;
    while (j + 1 < obs.size() && scores[obs[j + 1]] == scores[obs[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[k] = avg;
    i = j + 1;
  }
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (labels[obs[i]] == 1.0) rank_sum += rank[i];
  }
  const double p = positives;
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * negatives);
}

double rmse(const std::vector<double>& preds, const std::vector<double>& labels) {
  double acc = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::isnan(labels[i])) continue;
    const double d = preds[i] - labels[i];
    acc += d * d;
    ++count;
  }
  if (count == 0) throw Error(Error::Kind::AllLabelsMissing, "no observed labels");
  return std::sqrt(acc / count);
}

double accuracy(const std::vector<double>& scores, const std::vector<double>& labels) {
  int hits = 0;
  int count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::isnan(labels[i])) continue;
    const double pred = scores[i] >= 0.5 ? 1.0 : 0.0;
    hits += pred == labels[i] ? 1 : 0;
    ++count;
  }
  if (count == 0) throw Error(Error::Kind::AllLabelsMissing, "no observed labels");
  return static_cast<double>(hits) / count;
}

MetricReport evaluate_metrics(const Tensor& preds, const Tensor& labels,
                              const std::vector<TaskType>& task_types,
                              const std::vector<std::string>& task_names) {
  MetricReport report;
  bool any_classification = false;
  for (TaskType t : task_types) any_classification |= t == TaskType::Classification;
  report.metric = any_classification ? "roc_auc" : "rmse";

  double sum = 0.0;
  int counted = 0;
  for (int t = 0; t < labels.cols(); ++t) {
    std::vector<double> col_pred(labels.rows()), col_label(labels.rows());
    for (int i = 0; i < labels.rows(); ++i) {
      col_pred[i] = preds.at(i, t);
      col_label[i] = labels.at(i, t);
    }
    TaskMetric tm;
    tm.task = task_names[t];
    if (task_types[t] == TaskType::Classification) {
      tm.metric = "roc_auc";
      try {
        tm.value = roc_auc(col_pred, col_label);
      } catch (const Error&) {
        tm.skipped = true;
      }
    } else {
      tm.metric = "rmse";
      try {
        tm.value = rmse(col_pred, col_label);
      } catch (const Error&) {
        tm.skipped = true;
      }
    }
    if (!tm.skipped) {
      sum += tm.value;
      ++counted;
    }
    report.per_task.push_back(std::move(tm));
  }
  report.mean = counted > 0 ? sum / counted : 0.0;
  return report;
}

}  // namespace gaan
