#pragma once

#include <string>
#include <vector>

#include "gaan/dataset.hpp"
#include "gaan/metrics.hpp"
#include "gaan/model.hpp"

namespace gaan {

// One training run as described by a key=value config file.
struct RunConfig {
  ModelConfig model;
  std::string graph_path;
  std::string label_path;  // empty = labels embedded in the JSONL
  std::string out_dir = ".";
  std::uint64_t split_seed = 0;
  bool split_seed_explicit = false;
};

// Parses `key=value` lines ('#' comments and blank lines ignored). Unknown
// keys are errors. split_seed defaults to the model seed.
RunConfig parse_run_config(const std::string& path);

// Standard bias-corrected Adam. step counts from 1. Throws
// NonFiniteGradient when any gradient entry is not finite.
void adam_step(std::vector<ParamEntry>& params, const std::vector<Tensor>& grads, double lr,
               int step, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

struct TrainResult {
  ModelSnapshot best;
  bool has_best = false;
  int best_epoch = -1;
  double best_metric = 0.0;
  std::string metric_name;
  std::vector<std::string> history;  // CSV rows: epoch,split,metric,value
  int epochs_run = 0;
};

// Minibatch Adam with early stopping on the validation metric (mean ROC-AUC
// maximized for classification, RMSE minimized for regression). The model is
// left at the best snapshot. With an empty or degenerate validation set the
// run goes the full epoch budget.
TrainResult train_model(Model& model, const Dataset& train_set, const Dataset& valid_set);

// Eval-mode predictions for a whole dataset, in dataset order.
Tensor predict_dataset(Model& model, const Dataset& ds);

MetricReport evaluate_model(Model& model, const Dataset& ds);

// Canonical float formatting used for the metrics CSV (round-trip exact).
std::string format_metric(double v);

void write_history_csv(const std::string& path, const std::vector<std::string>& rows);

}  // namespace gaan
