// gaan: command-line front end. Subcommands: mol2jsonl, fold, train, eval,
// gradcheck. Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 check failure.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaan/dataset.hpp"
#include "gaan/dot_export.hpp"
#include "gaan/error.hpp"
#include "gaan/fold.hpp"
#include "gaan/gradcheck.hpp"
#include "gaan/graph_io.hpp"
#include "gaan/metrics.hpp"
#include "gaan/model.hpp"
#include "gaan/smiles.hpp"
#include "gaan/train.hpp"

namespace {

using namespace gaan;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case Error::Kind::ConfigError:
      return 1;
    case Error::Kind::NonFiniteGradient:
    case Error::Kind::CheckpointMismatch:
      return 3;
    default:
      return 2;
  }
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("GAAN_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::uint64_t value = 0;
  const char* end = raw + std::string(raw).size();
  auto [p, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc() || p != end) {
    throw Error(Error::Kind::ConfigError, std::string("GAAN_SEED is not an integer: ") + raw);
  }
  return value;
}

std::string trim_copy(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(trim_copy(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(trim_copy(cur));
  return cells;
}

double parse_label(const std::string& cell) {
  if (cell.empty() || cell == "nan" || cell == "NaN" || cell == "NA") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::size_t used = 0;
  double v = std::stod(cell, &used);
  if (used != cell.size()) throw std::invalid_argument("trailing characters");
  return v;
}

void print_report(std::ostream& out, const std::string& split, const MetricReport& r) {
  bool any_scored = false;
  for (const TaskMetric& tm : r.per_task) {
    out << split << "  " << tm.task << "  " << tm.metric << " = ";
    if (tm.skipped) {
      out << "skipped\n";
    } else {
      out << format_metric(tm.value) << '\n';
      any_scored = true;
    }
  }
  out << split << "  mean  " << r.metric << " = "
      << (any_scored ? format_metric(r.mean) : "skipped") << '\n';
}

// ---------------------------------------------------------------- mol2jsonl

struct Mol2JsonlArgs {
  std::string smiles_path;
  std::string out_path;
  std::string labels_path;
};

int run_mol2jsonl(const Mol2JsonlArgs& a) {
  std::ifstream in(a.smiles_path);
  if (!in) {
    std::cerr << "error: cannot open " << a.smiles_path << '\n';
    return 2;
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(trim_copy(line));

  // Input is either one SMILES per line or a CSV `smiles,<task>,...` file.
  bool csv_mode = false;
  std::vector<std::string> inline_tasks;
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  if (first < lines.size()) {
    std::vector<std::string> header = split_csv(lines[first]);
    if (header[0] == "smiles") {
      csv_mode = true;
      inline_tasks.assign(header.begin() + 1, header.end());
      if (!a.labels_path.empty()) {
        throw Error(Error::Kind::ConfigError,
                    "input already carries labels; drop --labels or the CSV header");
      }
    }
  }

  std::vector<GraphRecord> records;
  std::vector<int> line_of_record;  // 0-based input line per converted record
  int lineno = -1;
  int attempted = 0;
  int rejected = 0;
  for (const std::string& raw : lines) {
    ++lineno;
    if (raw.empty()) continue;
    if (csv_mode && lineno == static_cast<int>(first)) continue;  // header
    std::string smiles = raw;
    std::vector<double> labels;
    if (csv_mode) {
      std::vector<std::string> cells = split_csv(raw);
      if (cells.size() != inline_tasks.size() + 1) {
        throw Error(Error::Kind::ParseError, a.smiles_path + ":" + std::to_string(lineno + 1) +
                                                 ": expected " +
                                                 std::to_string(inline_tasks.size() + 1) +
                                                 " cells");
      }
      smiles = cells[0];
      for (std::size_t t = 1; t < cells.size(); ++t) {
        try {
          labels.push_back(parse_label(cells[t]));
        } catch (const std::exception&) {
          throw Error(Error::Kind::ParseError, a.smiles_path + ":" + std::to_string(lineno + 1) +
                                                   ": bad label '" + cells[t] + "'");
        }
      }
    }
    ++attempted;
    try {
      GraphRecord rec;
      rec.graph = parse_smiles(smiles);
      rec.labels = std::move(labels);
      rec.has_labels = csv_mode;
      records.push_back(std::move(rec));
      line_of_record.push_back(lineno);
    } catch (const SmilesError& e) {
      std::cerr << a.smiles_path << ":" << (lineno + 1) << ": rejected: " << e.what() << '\n';
      ++rejected;
    }
  }
  if (attempted == 0) {
    std::cerr << "error: " << a.smiles_path << " contains no molecules\n";
    return 2;
  }
  if (records.empty()) {
    std::cerr << "error: every input line was rejected\n";
    return 2;
  }

  if (!a.labels_path.empty()) {
    std::ifstream lab(a.labels_path);
    if (!lab) throw Error(Error::Kind::IoError, "cannot open labels file: " + a.labels_path);
    std::string row;
    if (!std::getline(lab, row)) {
      throw Error(Error::Kind::ParseError, a.labels_path + ": empty labels file");
    }
    std::vector<std::string> header = split_csv(row);
    if (header.empty() || header[0] != "id" || header.size() < 2) {
      throw Error(Error::Kind::ParseError, a.labels_path + ": header must be id,<task>,...");
    }
    const int tasks = static_cast<int>(header.size()) - 1;
    // record index by input line number
    std::vector<int> rec_at_line(lineno + 1, -1);
    for (int r = 0; r < static_cast<int>(records.size()); ++r) rec_at_line[line_of_record[r]] = r;
    for (GraphRecord& rec : records) {
      rec.labels.assign(tasks, std::numeric_limits<double>::quiet_NaN());
      rec.has_labels = true;
    }
    int rowno = 1;
    while (std::getline(lab, row)) {
      ++rowno;
      if (trim_copy(row).empty()) continue;
      std::vector<std::string> cells = split_csv(row);
      if (static_cast<int>(cells.size()) != tasks + 1) {
        throw Error(Error::Kind::ParseError, a.labels_path + ":" + std::to_string(rowno) +
                                                 ": expected " + std::to_string(tasks + 1) +
                                                 " cells");
      }
      int id = -1;
      try {
        id = std::stoi(cells[0]);
      } catch (const std::exception&) {
        throw Error(Error::Kind::ParseError,
                    a.labels_path + ":" + std::to_string(rowno) + ": bad id '" + cells[0] + "'");
      }
      if (id < 0 || id > lineno) {
        throw Error(Error::Kind::ParseError, a.labels_path + ":" + std::to_string(rowno) +
                                                 ": id " + cells[0] + " is not an input line");
      }
      if (rec_at_line[id] < 0) {
        std::cerr << a.labels_path << ":" << rowno << ": label for rejected molecule " << id
                  << " dropped\n";
        continue;
      }
      GraphRecord& rec = records[rec_at_line[id]];
      for (int t = 0; t < tasks; ++t) {
        try {
          rec.labels[t] = parse_label(cells[t + 1]);
        } catch (const std::exception&) {
          throw Error(Error::Kind::ParseError, a.labels_path + ":" + std::to_string(rowno) +
                                                   ": bad label '" + cells[t + 1] + "'");
        }
      }
    }
  }

  write_graph_jsonl(a.out_path, records);
  std::cout << "converted " << records.size() << " of " << attempted << " molecules ("
            << rejected << " rejected) -> " << a.out_path << '\n';
  return 0;
}

// --------------------------------------------------------------------- fold

struct FoldArgs {
  std::string graph_path;
  int levels = 3;
  int index = 0;
  std::string dump;  // "", "dot", "json"
  std::string out_prefix = "pyramid";
  double alpha = 1.0, beta = 1.0, omega = 1.0, theta = 1.0;
};

int run_fold(const FoldArgs& a) {
  std::vector<GraphRecord> records = read_graph_jsonl(a.graph_path);
  if (a.index < 0 || a.index >= static_cast<int>(records.size())) {
    throw Error(Error::Kind::ConfigError,
                "--index " + std::to_string(a.index) + " out of range (file has " +
                    std::to_string(records.size()) + " graphs)");
  }
  const AttributedGraph& g = records[a.index].graph;
  std::vector<std::pair<FoldParams, RingCollapseParams>> layers(
      a.levels, {FoldParams{a.alpha, a.beta}, RingCollapseParams{a.omega, a.theta}});
  FoldingPyramid p = build_pyramid(g, layers);

  int first_fix = -1;
  for (int h = 1; h < isize(p.levels); ++h) {
    if (p.levels[h].fixpoint) {
      first_fix = h - 1;  // the step out of level h-1 changed nothing
      break;
    }
  }
  for (int h = 0; h < isize(p.levels); ++h) {
    const FoldingLevel& lv = p.levels[h];
    std::cout << "level " << h << ": n=" << lv.graph.n << " m=" << lv.graph.m()
              << " marginal_vertices="
              << lv.marginal.marginal_leaf_vertices.size() +
                     lv.marginal.marginal_ring_vertices.size()
              << (lv.fixpoint ? " (fixpoint)" : "") << '\n';
  }
  if (first_fix >= 0) {
    std::cout << "warning: fixpoint at level " << first_fix << '\n';
  }
  if (!a.dump.empty()) {
    for (const std::string& path : write_pyramid_dumps(p, a.out_prefix, a.dump)) {
      std::cout << "wrote " << path << '\n';
    }
  }
  return 0;
}

// -------------------------------------------------------------------- train

int run_train(const std::string& config_path) {
  RunConfig rc = parse_run_config(config_path);
  if (auto env = seed_from_env()) {
    rc.model.seed = *env;
    if (!rc.split_seed_explicit) rc.split_seed = *env;
  }
  if (rc.graph_path.empty()) {
    throw Error(Error::Kind::ConfigError, "config key 'graphs' is required for training");
  }
  DatasetSplits splits = load_dataset(rc.graph_path, rc.label_path, rc.split_seed);
  std::cout << "dataset: " << splits.train.size() << " train / " << splits.valid.size()
            << " valid / " << splits.test.size() << " test, " << splits.train.tasks()
            << " task(s)\n";
  AttributeSchema schema = AttributeSchema::build(splits.train.graphs);
  Model model(rc.model, schema, splits.train.task_types, splits.train.task_names);
  TrainResult res = train_model(model, splits.train, splits.valid);

  std::filesystem::create_directories(rc.out_dir);
  const std::string metrics_path = rc.out_dir + "/metrics.csv";
  const std::string ckpt_path = rc.out_dir + "/model.json";
  write_history_csv(metrics_path, res.history);
  model.save_checkpoint(ckpt_path);

  std::cout << "epochs run: " << res.epochs_run << '\n';
  if (res.has_best) {
    std::cout << "best epoch: " << res.best_epoch << " (valid " << res.metric_name << " = "
              << format_metric(res.best_metric) << ")\n";
  }
  if (splits.valid.size() > 0) print_report(std::cout, "valid", evaluate_model(model, splits.valid));
  if (splits.test.size() > 0) print_report(std::cout, "test", evaluate_model(model, splits.test));
  std::cout << "wrote " << metrics_path << '\n' << "wrote " << ckpt_path << '\n';
  return 0;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint;
  std::string graph_path;
  std::string labels_path;
};

int run_eval(const EvalArgs& a) {
  Model model = Model::load_checkpoint(a.checkpoint);
  std::vector<GraphRecord> records = read_graph_jsonl(a.graph_path);
  std::vector<std::string> names;
  if (!a.labels_path.empty()) attach_label_csv(records, a.labels_path, &names);
  Dataset ds = dataset_from_records(records, names);
  if (ds.tasks() != model.tasks()) {
    throw Error(Error::Kind::CheckpointMismatch,
                "dataset has " + std::to_string(ds.tasks()) + " task(s) but the checkpoint expects " +
                    std::to_string(model.tasks()));
  }
  Tensor preds = predict_dataset(model, ds);
  MetricReport report = evaluate_metrics(preds, ds.labels, model.task_types(), model.task_names());
  print_report(std::cout, "eval", report);
  return 0;
}

// ---------------------------------------------------------------- gradcheck

int run_gradcheck_cmd(std::uint64_t seed, const std::string& corrupt) {
  GradCheckReport report = run_gradcheck(seed, corrupt);
  std::cout << format_gradcheck_report(report);
  return report.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAAN molecular property prediction tools"};
  app.require_subcommand(1);

  Mol2JsonlArgs mol;
  CLI::App* cmd_mol = app.add_subcommand(
      "mol2jsonl", "Convert a SMILES file (one molecule per line) to a JSONL graph file");
  cmd_mol->add_option("smiles", mol.smiles_path, "input SMILES file")->required();
  cmd_mol->add_option("out", mol.out_path, "output JSONL path")->required();
  cmd_mol->add_option("--labels", mol.labels_path,
                      "CSV id,<task>,... where id is the 0-based input line number");

  FoldArgs fold;
  CLI::App* cmd_fold =
      app.add_subcommand("fold", "Fold a graph and inspect or dump the resulting pyramid");
  cmd_fold->add_option("graph", fold.graph_path, "JSONL graph file")->required();
  cmd_fold->add_option("--levels", fold.levels, "folding iterations to run")
      ->check(CLI::Range(1, 1000));
  cmd_fold->add_option("--index", fold.index, "which graph in the file (default 0)");
  cmd_fold->add_option("--dump-pyramid", fold.dump, "write per-level files (dot or json)")
      ->check(CLI::IsMember({"dot", "json"}));
  cmd_fold->add_option("--out-prefix", fold.out_prefix, "dump filename prefix");
  cmd_fold->add_option("--alpha", fold.alpha, "leaf fold vertex coefficient");
  cmd_fold->add_option("--beta", fold.beta, "leaf fold edge coefficient");
  cmd_fold->add_option("--omega", fold.omega, "ring collapse vertex coefficient");
  cmd_fold->add_option("--theta", fold.theta, "ring collapse edge coefficient");

  std::string train_config;
  CLI::App* cmd_train = app.add_subcommand("train", "Train a model from a key=value config file");
  cmd_train->add_option("config", train_config, "config file path")->required();

  EvalArgs ev;
  CLI::App* cmd_eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  cmd_eval->add_option("checkpoint", ev.checkpoint, "checkpoint JSON path")->required();
  cmd_eval->add_option("graph", ev.graph_path, "JSONL graph file")->required();
  cmd_eval->add_option("--labels", ev.labels_path, "CSV labels (default: labels from the JSONL)");

  std::uint64_t gc_seed = 1;
  std::string gc_corrupt;
  CLI::App* cmd_gc =
      app.add_subcommand("gradcheck", "Check analytic gradients against finite differences");
  CLI::Option* gc_seed_opt = cmd_gc->add_option("--seed", gc_seed, "fixture seed (default 1)");
  cmd_gc->add_option("--corrupt", gc_corrupt,
                     "test hook: perturb the analytic gradient of this parameter class");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*cmd_mol) return run_mol2jsonl(mol);
    if (*cmd_fold) return run_fold(fold);
    if (*cmd_train) return run_train(train_config);
    if (*cmd_eval) return run_eval(ev);
    if (*cmd_gc) {
      if (gc_seed_opt->count() == 0) {
        if (auto env = seed_from_env()) gc_seed = *env;
      }
      return run_gradcheck_cmd(gc_seed, gc_corrupt);
    }
  } catch (const SmilesError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
