#include "gaan/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "gaan/error.hpp"

namespace gaan {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw Error(Error::Kind::ConfigError, "config key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw Error(Error::Kind::ConfigError, "config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(Error::Kind::ConfigError, "config key '" + key + "': expected true/false, got '" + v + "'");
}

}  // namespace

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::IoError, "cannot open config file: " + path);
  RunConfig rc;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw Error(Error::Kind::ConfigError,
                  path + ":" + std::to_string(lineno) + ": expected key=value, got '" + s + "'");
    }
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key == "arch") {
      rc.model.arch = val;
    } else if (key == "lambda") {
      rc.model.lambda = parse_double(key, val);
    } else if (key == "learn_lambda") {
      rc.model.learn_lambda = parse_bool(key, val);
    } else if (key == "encoder_width") {
      rc.model.encoder_width = static_cast<int>(parse_int(key, val));
    } else if (key == "recon_weight") {
      rc.model.recon_weight = parse_double(key, val);
    } else if (key == "lr") {
      rc.model.lr = parse_double(key, val);
    } else if (key == "batch_size") {
      rc.model.batch_size = static_cast<int>(parse_int(key, val));
    } else if (key == "max_epochs") {
      rc.model.max_epochs = static_cast<int>(parse_int(key, val));
    } else if (key == "patience") {
      rc.model.patience = static_cast<int>(parse_int(key, val));
    } else if (key == "seed") {
      rc.model.seed = static_cast<std::uint64_t>(parse_int(key, val));
    } else if (key == "graphs") {
      rc.graph_path = val;
    } else if (key == "labels") {
      rc.label_path = val;
    } else if (key == "out_dir") {
      rc.out_dir = val;
    } else if (key == "split_seed") {
      rc.split_seed = static_cast<std::uint64_t>(parse_int(key, val));
      rc.split_seed_explicit = true;
    } else {
      throw Error(Error::Kind::ConfigError,
                  path + ":" + std::to_string(lineno) + ": unknown config key '" + key + "'");
    }
  }
  if (!rc.split_seed_explicit) rc.split_seed = rc.model.seed;
  if (rc.model.batch_size < 1)
    throw Error(Error::Kind::ConfigError, "batch_size must be at least 1");
  if (rc.model.max_epochs < 1)
    throw Error(Error::Kind::ConfigError, "max_epochs must be at least 1");
  if (rc.model.encoder_width < 1)
    throw Error(Error::Kind::ConfigError, "encoder_width must be at least 1");
  return rc;
}

void adam_step(std::vector<ParamEntry>& params, const std::vector<Tensor>& grads, double lr,
               int step, double beta1, double beta2, double eps) {
  if (isize(grads) != isize(params)) {
    throw Error(Error::Kind::RowCountMismatch, "adam_step: gradient list does not match parameter list");
  }
  const double c1 = 1.0 - std::pow(beta1, step);
  const double c2 = 1.0 - std::pow(beta2, step);
  for (int i = 0; i < isize(params); ++i) {
    ParamEntry& p = params[i];
    const Tensor& g = grads[i];
    if (g.rows() != p.value.rows() || g.cols() != p.value.cols()) {
      throw Error(Error::Kind::DimensionMismatch, "adam_step: gradient shape mismatch for " + p.name);
    }
    if (!g.all_finite()) {
      throw Error(Error::Kind::NonFiniteGradient, "non-finite gradient for parameter " + p.name);
    }
    for (int k = 0; k < p.value.size(); ++k) {
      p.m1[k] = beta1 * p.m1[k] + (1.0 - beta1) * g[k];
      p.m2[k] = beta2 * p.m2[k] + (1.0 - beta2) * g[k] * g[k];
      const double m_hat = p.m1[k] / c1;
      const double v_hat = p.m2[k] / c2;
      p.value[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

std::string format_metric(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

void write_history_csv(const std::string& path, const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Error::Kind::IoError, "cannot write metrics file: " + path);
  out << "epoch,split,metric,value\n";
  for (const std::string& r : rows) out << r << '\n';
}

namespace {

// Number of non-missing label entries in rows [begin, begin+count).
int observed_count(const Tensor& labels, const std::vector<int>& order, int begin, int count) {
  int total = 0;
  for (int i = begin; i < begin + count; ++i) {
    const int r = order[i];
    for (int t = 0; t < labels.cols(); ++t) {
      if (!std::isnan(labels.at(r, t))) ++total;
    }
  }
  return total;
}

}  // namespace

Tensor predict_dataset(Model& model, const Dataset& ds) {
  const int n = ds.size();
  Tensor out(n, model.tasks());
  std::vector<PreparedGraph> prep;
  prep.reserve(n);
  for (const AttributedGraph& g : ds.graphs) prep.push_back(model.prepare(g));
  const int bs = std::max(1, model.config().batch_size);
  for (int begin = 0; begin < n; begin += bs) {
    const int count = std::min(bs, n - begin);
    std::vector<const PreparedGraph*> batch;
    batch.reserve(count);
    for (int i = 0; i < count; ++i) batch.push_back(&prep[begin + i]);
    Tensor p = model.predict(batch);
    for (int i = 0; i < count; ++i) {
      for (int t = 0; t < model.tasks(); ++t) out.at(begin + i, t) = p.at(i, t);
    }
  }
  return out;
}

MetricReport evaluate_model(Model& model, const Dataset& ds) {
  Tensor preds = predict_dataset(model, ds);
  return evaluate_metrics(preds, ds.labels, ds.task_types, ds.task_names);
}

TrainResult train_model(Model& model, const Dataset& train_set, const Dataset& valid_set) {
  if (train_set.size() == 0) {
    throw Error(Error::Kind::RowCountMismatch, "training split is empty");
  }
  const ModelConfig& cfg = model.config();
  const int n = train_set.size();
  const int tasks = model.tasks();
  if (train_set.labels.cols() != tasks) {
    throw Error(Error::Kind::DimensionMismatch, "training labels do not match the model task count");
  }

  std::vector<PreparedGraph> prep;
  prep.reserve(n);
  for (const AttributedGraph& g : train_set.graphs) prep.push_back(model.prepare(g));

  std::vector<bool> is_cls(tasks);
  for (int t = 0; t < tasks; ++t) is_cls[t] = model.task_types()[t] == TaskType::Classification;

  TrainResult res;
  std::mt19937_64 shuffle_rng(cfg.seed);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  const bool have_valid = valid_set.size() > 0;
  bool maximize = false;
  int since_best = 0;
  int adam_t = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    // Deterministic Fisher-Yates reshuffle each epoch.
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }

    double loss_sum = 0.0;
    int loss_weight = 0;
    double recon_sum = 0.0;
    int batches = 0;
    for (int begin = 0; begin < n; begin += cfg.batch_size) {
      const int count = std::min(cfg.batch_size, n - begin);
      std::vector<const PreparedGraph*> batch;
      batch.reserve(count);
      Tensor labels(count, tasks);
      for (int i = 0; i < count; ++i) {
        const int r = order[begin + i];
        batch.push_back(&prep[r]);
        for (int t = 0; t < tasks; ++t) labels.at(i, t) = train_set.labels.at(r, t);
      }

      Tape tape;
      Model::Forward fw = model.forward(tape, batch, /*training=*/true);
      Var loss = tape.multitask_loss(fw.logits, labels, is_cls);
      Var total = loss;
      if (fw.recon.valid() && cfg.recon_weight != 0.0) {
        total = tape.add_scaled(loss, fw.recon, cfg.recon_weight);
        recon_sum += tape.value(fw.recon).at(0, 0);
      }
      tape.backward(total);
      model.pull_grads(tape);
      adam_step(model.params(), model.last_grads(), cfg.lr, ++adam_t);

      const int obs = observed_count(train_set.labels, order, begin, count);
      loss_sum += tape.value(loss).at(0, 0) * obs;
      loss_weight += obs;
      ++batches;
    }

    const double train_loss = loss_weight > 0 ? loss_sum / loss_weight : 0.0;
    res.history.push_back(std::to_string(epoch) + ",train,loss," + format_metric(train_loss));
    if (cfg.recon_weight != 0.0 && batches > 0) {
      res.history.push_back(std::to_string(epoch) + ",train,recon," + format_metric(recon_sum / batches));
    }
    res.epochs_run = epoch;

    if (!have_valid) continue;

    MetricReport report = evaluate_model(model, valid_set);
    bool any_scored = false;
    for (const TaskMetric& tm : report.per_task) {
      if (!tm.skipped) any_scored = true;
    }
    res.history.push_back(std::to_string(epoch) + ",valid," + report.metric + "," +
                          format_metric(any_scored ? report.mean : std::nan("")));
    if (!any_scored) continue;  // degenerate split: no stopping signal

    res.metric_name = report.metric;
    maximize = report.metric == "roc_auc";
    const bool better = !res.has_best || (maximize ? report.mean > res.best_metric
                                                   : report.mean < res.best_metric);
    if (better) {
      res.best = model.snapshot();
      res.best.epoch = epoch;
      res.best.metric = report.mean;
      res.has_best = true;
      res.best_epoch = epoch;
      res.best_metric = report.mean;
      since_best = 0;
    } else {
      ++since_best;
      if (cfg.patience > 0 && since_best >= cfg.patience) break;
    }
  }

  if (res.has_best) model.restore(res.best);
  return res;
}

}  // namespace gaan
