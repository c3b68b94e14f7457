// Release gate for the pipeline: ten end-to-end checks, one PASS/FAIL line
// each, nonzero exit if anything fails. Checks with a runtime budget fail
// when they exceed it.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gaan/dataset.hpp"
#include "gaan/fold.hpp"
#include "gaan/gradcheck.hpp"
#include "gaan/graph.hpp"
#include "gaan/graph_io.hpp"
#include "gaan/margin.hpp"
#include "gaan/metrics.hpp"
#include "gaan/model.hpp"
#include "gaan/smiles.hpp"
#include "gaan/train.hpp"
#include "test_util.hpp"

#ifndef GAAN_CLI_PATH
#error "GAAN_CLI_PATH must point at the gaan executable"
#endif
#ifndef GAAN_DATA_DIR
#error "GAAN_DATA_DIR must point at the repository data directory"
#endif

using namespace gaan;
using namespace gaan::testutil;

namespace {

using Clock = std::chrono::steady_clock;

// Optional extra context a passing check may leave for its summary line.
std::string g_note;

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

// ------------------------------------------------------------------ check 1

std::string check_fold_conservation() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 29);  // 2..30
    AttributedGraph g = with_random_features(random_tree(rng, n), rng, 4, 4);
    const RingSystem rings = find_cycle_basis(g);
    const MarginalStructure ms = get_marginal_structure(g, rings);
    const FoldStepResult step = fold_step(g, ms, rings, FoldParams{1.0, 1.0}, RingCollapseParams{});

    // With alpha = beta = 1 a fold moves every leaf row intact into its
    // neighbor, so the new vertex total equals the old vertex total plus the
    // rows of the folded marginal edges.
    for (int c = 0; c < 4; ++c) {
      double expected = 0.0;
      for (int v = 0; v < g.n; ++v) expected += g.x_v.at(v, c);
      for (int e : ms.marginal_leaf_edges) expected += g.x_e.at(e, c);
      double got = 0.0;
      for (int v = 0; v < step.graph.n; ++v) got += step.graph.x_v.at(v, c);
      const double rel = std::abs(got - expected) / std::max(1.0, std::abs(expected));
      worst = std::max(worst, rel);
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (worst > 1e-12) return "max relative drift " + fmt(worst) + " > 1e-12";
  if (secs > 5.0) return "took " + fmt(secs) + "s > 5s";
  return "";
}

// ------------------------------------------------------------------ check 2

int iterations_to_single_vertex(AttributedGraph g) {
  int iters = 0;
  const int guard = 10 * std::max(1, g.n);
  while (g.n > 1) {
    const RingSystem rings = find_cycle_basis(g);
    const MarginalStructure ms = get_marginal_structure(g, rings);
    const FoldStepResult step = fold_step(g, ms, rings, FoldParams{}, RingCollapseParams{});
    if (!step.changed || ++iters > guard) return -1;
    g = step.graph;
  }
  return iters;
}

std::string check_fold_progress() {
  for (int n = 2; n <= 50; ++n) {
    const int expected = n / 2;  // == ceil((n-1)/2), and 1 for n = 2
    const int got = iterations_to_single_vertex(path_graph(n));
    if (got != expected)
      return "P_" + std::to_string(n) + " folded in " + std::to_string(got) + " iterations, want " +
             std::to_string(expected);
  }
  for (int leaves = 2; leaves <= 20; ++leaves) {
    const int got = iterations_to_single_vertex(star_graph(leaves));
    if (got != 1)
      return "S_" + std::to_string(leaves) + " folded in " + std::to_string(got) +
             " iterations, want 1";
  }
  return "";
}

// ------------------------------------------------------------------ check 3

std::string check_ring_handling() {
  // One pendant on a hexagon: the leaf folds away and the trimmed ring
  // collapses to a single surrogate in the same iteration.
  AttributedGraph g = ring_with_pendant();
  g.x_v = Tensor::full(g.n, 1, 1.0);
  g.x_e = Tensor::full(g.m(), 1, 1.0);
  std::vector<std::pair<FoldParams, RingCollapseParams>> layers(2);
  const FoldingPyramid p = build_pyramid(g, layers);
  const FoldingLevel& lv1 = p.levels.at(1);
  if (lv1.graph.n != 1) return "level 1 has n=" + std::to_string(lv1.graph.n) + ", want 1";
  if (!p.levels[0].leaf_plan.has_alpha()) return "level 0 plan shows no leaf fold";
  if (!p.levels[0].collapse_plan.has_ring()) return "level 0 plan shows no ring collapse";
  if (lv1.graph.vertex_attrs[0].element != kRingSurrogateElement)
    return "level 1 vertex is not a ring surrogate";
  if (lv1.hypermap[0].members.size() != 7) return "surrogate provenance misses vertices";

  // Collapse eligibility by external branch count: {0: yes, 1: yes, 2: no}.
  const std::vector<std::pair<int, bool>> table = {{0, true}, {1, true}, {2, false}};
  for (const auto& [branches, want] : table) {
    AttributedGraph ring = cycle_graph(6);
    std::vector<std::pair<int, int>> edges = ring.edges;
    for (int b = 0; b < branches; ++b) edges.emplace_back(3 * b, 6 + b);
    AttributedGraph gb = from_edges(6 + branches, edges);
    const RingSystem rings = find_cycle_basis(gb);
    if (rings.unit_count != 1) return "branch fixture has wrong unit count";
    if (should_collapse_ring(gb, rings, 0) != want)
      return "should_collapse_ring with " + std::to_string(branches) + " branches != " +
             (want ? "true" : "false");
  }
  return "";
}

// ------------------------------------------------------------------ check 4

// Independent regrouping oracle: pairwise-merge basis cycles that share an
// edge until closure, then compare the partition with the library's units.
std::string units_match_closure(const AttributedGraph& g, const RingSystem& rings,
                                int expected_units) {
  std::map<std::pair<int, int>, int> edge_id;
  for (int e = 0; e < g.m(); ++e) edge_id[g.edges[e]] = e;
  const int k = isize(rings.cycles);
  std::vector<std::set<int>> cycle_edges(k);
  for (int i = 0; i < k; ++i) {
    const std::vector<int>& walk = rings.cycles[i];
    for (int j = 0; j < isize(walk); ++j) {
      int u = walk[j], v = walk[(j + 1) % walk.size()];
      if (u > v) std::swap(u, v);
      const auto it = edge_id.find({u, v});
      if (it == edge_id.end()) return "cycle walk uses a missing edge";
      cycle_edges[i].insert(it->second);
    }
  }
  std::vector<int> group(k);
  std::iota(group.begin(), group.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        if (group[i] == group[j]) continue;
        const bool share = std::any_of(cycle_edges[i].begin(), cycle_edges[i].end(),
                                       [&](int e) { return cycle_edges[j].count(e) > 0; });
        if (share) {
          const int from = group[j], to = group[i];
          for (int& gid : group)
            if (gid == from) gid = to;
          changed = true;
        }
      }
  }
  std::set<int> distinct(group.begin(), group.end());
  if (isize(distinct) != rings.unit_count)
    return "closure finds " + std::to_string(distinct.size()) + " units, library " +
           std::to_string(rings.unit_count);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if ((group[i] == group[j]) != (rings.unit_id[i] == rings.unit_id[j]))
        return "unit partition differs from edge-sharing closure";
  if (expected_units >= 0 && rings.unit_count != expected_units)
    return "found " + std::to_string(rings.unit_count) + " units, want " +
           std::to_string(expected_units);
  return "";
}

std::string check_cycle_basis() {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 14);  // 2..15
    const int extra = static_cast<int>(rng() % 4);
    AttributedGraph g = random_connected_graph(rng, n, extra);
    if (component_count(g) != 1) return "random graph generator broke connectivity";
    const RingSystem rings = find_cycle_basis(g);
    if (isize(rings.cycles) != g.m() - g.n + 1)
      return "basis size " + std::to_string(rings.cycles.size()) + " != m-n+1 on trial " +
             std::to_string(trial);
  }

  using Edges = std::vector<std::pair<int, int>>;
  struct Fused {
    std::string name;
    int n;
    Edges edges;
    int units;
  };
  const Edges hexagon = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}};
  Edges naphthalene = hexagon;
  for (auto e : Edges{{5, 6}, {6, 7}, {7, 8}, {8, 9}, {4, 9}}) naphthalene.push_back(e);
  Edges anthracene = naphthalene;
  for (auto e : Edges{{9, 10}, {10, 11}, {11, 12}, {12, 13}, {8, 13}}) anthracene.push_back(e);
  Edges theta = hexagon;
  theta.emplace_back(0, 3);
  Edges naph_plus_triangle = naphthalene;
  for (auto e : Edges{{10, 11}, {11, 12}, {10, 12}}) naph_plus_triangle.push_back(e);

  const std::vector<Fused> systems = {
      {"triangle", 3, {{0, 1}, {1, 2}, {0, 2}}, 1},
      {"square", 4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 1},
      {"hexagon", 6, hexagon, 1},
      {"naphthalene", 10, naphthalene, 1},
      {"anthracene", 14, anthracene, 1},
      {"theta", 6, theta, 1},
      {"K4", 4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, 1},
      {"tri+square edge-fused", 5, {{0, 1}, {1, 2}, {0, 2}, {1, 3}, {3, 4}, {0, 4}}, 1},
      {"two squares edge-fused", 6,
       {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {2, 4}, {4, 5}, {3, 5}}, 1},
      {"wheel W5", 6,
       {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}, 1},
      {"triangular prism", 6,
       {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {0, 3}, {1, 4}, {2, 5}}, 1},
      {"cube", 8,
       {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {4, 5}, {5, 6}, {6, 7}, {4, 7},
        {0, 4}, {1, 5}, {2, 6}, {3, 7}}, 1},
      {"pentagon+hexagon edge-fused", 9,
       {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {0, 5}, {5, 6}, {6, 7}, {7, 8}, {1, 8}}, 1},
      {"bowtie", 5, {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {3, 4}, {0, 4}}, 2},
      {"spiro squares", 7,
       {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 4}, {4, 5}, {5, 6}, {0, 6}}, 2},
      {"biphenyl", 12,
       {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5},
        {6, 7}, {7, 8}, {8, 9}, {9, 10}, {10, 11}, {6, 11}, {0, 6}}, 2},
      {"two hexagons bridged by a path", 13,
       {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}, {0, 6}, {6, 7},
        {7, 8}, {8, 9}, {9, 10}, {10, 11}, {11, 12}, {7, 12}}, 2},
      {"triangle and square apart", 7,
       {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {5, 6}, {3, 6}}, 2},
      {"naphthalene plus triangle", 13, naph_plus_triangle, 2},
      {"friendship F3", 7,
       {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {3, 4}, {0, 4}, {0, 5}, {5, 6}, {0, 6}}, 3},
  };
  if (systems.size() != 20) return "fused-system fixture list must have 20 entries";
  for (const Fused& f : systems) {
    const AttributedGraph g = from_edges(f.n, f.edges);
    const std::string err = units_match_closure(g, find_cycle_basis(g), f.units);
    if (!err.empty()) return f.name + ": " + err;
  }
  return "";
}

// ------------------------------------------------------------------ check 5

std::string check_gradient_oracle() {
  const auto t0 = Clock::now();
  const GradCheckReport report = run_gradcheck(1, "");
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  double worst = 0.0;
  std::string worst_cls;
  for (const GradCheckClass& c : report.classes) {
    if (c.max_rel_err > worst) {
      worst = c.max_rel_err;
      worst_cls = c.cls;
    }
    if (!c.pass) return "class " + c.cls + " rel err " + fmt(c.max_rel_err) + " > 1e-4";
  }
  if (!report.pass) return "gradcheck reported failure";
  if (secs > 30.0) return "took " + fmt(secs) + "s > 30s";
  return "";
}

// ------------------------------------------------------------------ check 6

std::string check_equivariance() {
  std::mt19937_64 rng(2024);
  std::vector<AttributedGraph> graphs;
  for (int i = 0; i < 50; ++i) {
    const int n = 2 + static_cast<int>(rng() % 11);  // 2..12
    graphs.push_back(random_connected_graph(rng, n, static_cast<int>(rng() % 4)));
  }
  ModelConfig cfg;
  cfg.arch = "GAC(7)-PMF-GAC(6)-PMF-GMP-Tanh";
  cfg.encoder_width = 5;
  cfg.seed = 42;
  Model model(cfg, AttributeSchema::build(graphs), {TaskType::Classification, TaskType::Regression},
              {"cls", "reg"});
  double worst = 0.0;
  for (const AttributedGraph& g : graphs) {
    const PreparedGraph pg = model.prepare(g);
    const Tensor before = model.predict({&pg});
    const AttributedGraph h = permute_graph(g, random_permutation(rng, g.n));
    const PreparedGraph ph = model.prepare(h);
    const Tensor after = model.predict({&ph});
    worst = std::max(worst, max_abs_diff(before, after));
  }
  if (worst > 1e-12) return "max output change under relabeling " + fmt(worst) + " > 1e-12";
  return "";
}

// ------------------------------------------------------------------ check 7

Dataset ring_dataset() {
  Dataset ds;
  std::vector<double> labels;
  for (int i = 0; i < 10; ++i) {
    ds.graphs.push_back(cycle_graph(3 + i % 5));
    labels.push_back(1.0);
    ds.graphs.push_back(path_graph(2 + i % 6));
    labels.push_back(0.0);
  }
  ds.labels = Tensor(20, 1);
  for (int i = 0; i < 20; ++i) ds.labels.at(i, 0) = labels[i];
  ds.task_types = {TaskType::Classification};
  ds.task_names = {"has_ring"};
  return ds;
}

std::string check_overfit() {
  const auto t0 = Clock::now();
  const Dataset ds = ring_dataset();
  const AttributeSchema schema = AttributeSchema::build(ds.graphs);
  int passed = 0;
  std::vector<double> train_acc;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ModelConfig cfg;
    cfg.arch = "GAC(8)-PMF-GAC(8)-PMF-GMP-Tanh";
    cfg.encoder_width = 6;
    cfg.lr = 0.001;
    cfg.batch_size = 4;
    cfg.max_epochs = 200;
    cfg.patience = 0;  // fixed epoch budget, no early stopping
    cfg.seed = seed;
    Model model(cfg, schema, ds.task_types, ds.task_names);
    (void)train_model(model, ds, Dataset{});
    const Tensor preds = predict_dataset(model, ds);
    std::vector<double> scores(20), labels(20);
    for (int i = 0; i < 20; ++i) {
      scores[i] = preds.at(i, 0);
      labels[i] = ds.labels.at(i, 0);
    }
    const double acc = accuracy(scores, labels);
    train_acc.push_back(acc);
    if (acc >= 0.95) ++passed;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (passed < 9) {
    std::string accs;
    for (double a : train_acc) accs += " " + fmt(a);
    return "only " + std::to_string(passed) + "/10 seeds reached 0.95 train accuracy:" + accs;
  }
  if (secs > 120.0) return "took " + fmt(secs) + "s > 2min";
  return "";
}

// ------------------------------------------------------------------ check 8

std::string check_solubility_smoke() {
  const auto t0 = Clock::now();
  const std::string path = std::string(GAAN_DATA_DIR) + "/solubility_sample.csv";
  std::ifstream in(path);
  if (!in) return "cannot open " + path;
  std::string line;
  if (!std::getline(in, line) || line.rfind("smiles,", 0) != 0)
    return "expected a smiles,<value> header";
  Dataset full;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) return "malformed row: " + line;
    full.graphs.push_back(parse_smiles(line.substr(0, comma)));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  const int n = isize(values);
  if (n < 50 || n > 500) return "dataset has " + std::to_string(n) + " rows, want 50..500";
  full.labels = Tensor(n, 1);
  for (int i = 0; i < n; ++i) full.labels.at(i, 0) = values[i];
  full.task_types = {TaskType::Regression};
  full.task_names = {"logS"};

  const DatasetSplits splits = split_dataset(full, 7);
  ModelConfig cfg;
  cfg.arch = "GAC(16)-PMF-GAC(16)-PMF-GMP-Tanh";
  cfg.encoder_width = 12;
  cfg.lr = 0.01;
  cfg.batch_size = 16;
  cfg.max_epochs = 80;
  cfg.patience = 15;
  cfg.seed = 3;
  Model model(cfg, AttributeSchema::build(splits.train.graphs), full.task_types, full.task_names);
  (void)train_model(model, splits.train, splits.valid);

  double mean = 0.0;
  for (int i = 0; i < splits.train.size(); ++i) mean += splits.train.labels.at(i, 0);
  mean /= splits.train.size();
  double base_se = 0.0;
  for (int i = 0; i < splits.valid.size(); ++i) {
    const double d = splits.valid.labels.at(i, 0) - mean;
    base_se += d * d;
  }
  const double baseline = std::sqrt(base_se / splits.valid.size());

  const MetricReport report = evaluate_model(model, splits.valid);
  if (report.per_task.size() != 1 || report.per_task[0].skipped)
    return "validation RMSE not scored";
  const double model_rmse = report.per_task[0].value;
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!(model_rmse < baseline))
    return "valid RMSE " + fmt(model_rmse) + " not below mean-baseline " + fmt(baseline);
  if (secs > 600.0) return "took " + fmt(secs) + "s > 10min";
  g_note = "RMSE " + fmt(model_rmse) + " vs baseline " + fmt(baseline);
  return "";
}

// ------------------------------------------------------------------ check 9

std::string check_parser() {
  const std::vector<std::string> corpus = {
      "C",         "CC",          "CCC",        "CCCC",        "CC(C)C",     "CC(C)(C)C",
      "CCO",       "OCCO",        "CCN",        "NCCN",        "CCCl",       "BrCCBr",
      "CC=O",      "CC(=O)O",     "CC(=O)N",    "C#N",         "CC#CC",      "C=CC=C",
      "CCOCC",     "COC",         "CCS",        "CS(=O)C",     "CP",         "CB",
      "FC(F)F",    "CCF",         "ICI",        "C1CC1",       "C1CCC1",     "C1CCCC1",
      "C1CCCCC1",  "C1CCCCCC1",   "C1CC1C",     "CC1CCCC1",    "C1CCCCC1O",  "OC1CCCCC1O",
      "c1ccccc1",  "c1ccncc1",    "c1ccoc1",    "c1ccsc1",     "c1cncnc1",
      "c1ccccc1C", "c1ccccc1O",   "c1ccccc1N",  "Cc1ccccc1C",  "c1ccc2ccccc2c1",
      "C1CC2CCC1CC2", "C1CCC2(CC1)CCCC2", "CC(C)Cc1ccccc1", "CC(=O)Oc1ccccc1C(=O)O"};
  if (corpus.size() != 50) return "corpus must have 50 strings";
  for (const std::string& s : corpus) {
    const AttributedGraph g = parse_smiles(s);
    const GraphRecord back = graph_from_jsonl_line(graph_to_jsonl_line(g, nullptr));
    if (back.graph.n != g.n || back.graph.edges != g.edges ||
        back.graph.vertex_attrs != g.vertex_attrs || back.graph.edge_attrs != g.edge_attrs)
      return "round trip changed " + s;
  }

  {  // ethane
    const AttributedGraph g = parse_smiles("CC");
    if (g.n != 2 || g.m() != 1 || g.vertex_attrs[0] != VertexAttr{"C", 1, 0, {}} ||
        g.vertex_attrs[1] != VertexAttr{"C", 1, 0, {}} ||
        g.edge_attrs[0] != EdgeAttr{BondOrder::Single, false})
      return "CC graph mismatch";
  }
  {  // cyclohexane
    const AttributedGraph g = parse_smiles("C1CCCCC1");
    if (g.n != 6 || g.m() != 6) return "C1CCCCC1 size mismatch";
    for (int v = 0; v < 6; ++v)
      if (g.vertex_attrs[v] != VertexAttr{"C", 2, 0, {}}) return "C1CCCCC1 vertex mismatch";
    for (int e = 0; e < 6; ++e)
      if (g.edge_attrs[e] != EdgeAttr{BondOrder::Single, true}) return "C1CCCCC1 edge mismatch";
  }
  {  // acetic acid
    const AttributedGraph g = parse_smiles("CC(=O)O");
    const std::vector<VertexAttr> want = {
        {"C", 1, 0, {}}, {"C", 4, 0, {}}, {"O", 2, 0, {}}, {"O", 1, 0, {}}};
    if (g.n != 4 || g.m() != 3 || g.vertex_attrs != want) return "CC(=O)O vertices mismatch";
    const std::map<std::pair<int, int>, BondOrder> bonds = {
        {{0, 1}, BondOrder::Single}, {{1, 2}, BondOrder::Double}, {{1, 3}, BondOrder::Single}};
    for (int e = 0; e < 3; ++e) {
      const auto it = bonds.find(g.edges[e]);
      if (it == bonds.end() || g.edge_attrs[e].bond_order != it->second)
        return "CC(=O)O bonds mismatch";
    }
  }
  return "";
}

// ----------------------------------------------------------------- check 10

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string check_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("gaan_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path d;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(d, ec);
    }
  } cleanup{dir};

  const Dataset ds = ring_dataset();
  std::vector<GraphRecord> records;
  for (int i = 0; i < ds.size(); ++i)
    records.push_back({ds.graphs[i], {ds.labels.at(i, 0)}, true});
  const std::string graphs = (dir / "graphs.jsonl").string();
  write_graph_jsonl(graphs, records);

  const std::string base = "arch = GAC(8)-PMF-GAC(8)-PMF-GMP-Tanh\n"
                           "encoder_width = 6\n"
                           "lr = 0.01\n"
                           "batch_size = 4\n"
                           "max_epochs = 5\n"
                           "patience = 3\n"
                           "seed = 9\n"
                           "graphs = " + graphs + "\n";
  for (const std::string run : {"run1", "run2"}) {
    std::ofstream cfg(dir / (run + ".ini"));
    cfg << base << "out_dir = " << (dir / run).string() << "\n";
    cfg.close();
    const std::string cmd = std::string("env -u GAAN_SEED ") + GAAN_CLI_PATH + " train " +
                            (dir / (run + ".ini")).string() + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0)
      return run + " exited with " + std::to_string(WEXITSTATUS(raw));
  }
  const std::string a = slurp(dir / "run1" / "metrics.csv");
  const std::string b = slurp(dir / "run2" / "metrics.csv");
  if (a.empty()) return "metrics.csv is empty";
  if (a != b) return "metric CSVs differ between identical runs";
  return "";
}

}  // namespace

int main() {
  struct Check {
    int id;
    std::string title;
    std::function<std::string()> fn;
  };
  const std::vector<Check> checks = {
      {1, "fold conservation (alpha=beta=1, 200 trees, 1e-12, <5s)", check_fold_conservation},
      {2, "fold progress (P_n in ceil((n-1)/2) iters, stars in 1)", check_fold_progress},
      {3, "ring handling (pendant-hexagon trace, branch truth table)", check_ring_handling},
      {4, "cycle basis (size m-n+1 on 100 graphs, 20 fused systems)", check_cycle_basis},
      {5, "gradient oracle (all classes within 1e-4 of FD, <30s)", check_gradient_oracle},
      {6, "equivariance (50 relabelings, outputs within 1e-12)", check_equivariance},
      {7, "overfit sanity (has-a-ring >=0.95 acc, >=9/10 seeds, <2min)", check_overfit},
      {8, "solubility smoke (valid RMSE below mean baseline, <10min)", check_solubility_smoke},
      {9, "parser (50-string round trip, grammar examples exact)", check_parser},
      {10, "determinism (byte-identical metric CSVs)", check_determinism},
  };

  int failed = 0;
  for (const Check& c : checks) {
    const auto t0 = Clock::now();
    g_note.clear();
    std::string detail;
    try {
      detail = c.fn();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = detail.empty();
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << "  " << c.title << "  ["
         << std::fixed << std::setprecision(2) << secs << "s]";
    if (!detail.empty()) line << "  -- " << detail;
    if (!g_note.empty()) line << "  -- " << g_note;
    std::cout << line.str() << '\n';
    if (!pass) ++failed;
  }
  if (failed > 0) {
    std::cout << failed << " acceptance check(s) failed\n";
    return 1;
  }
  std::cout << "all 10 acceptance checks passed\n";
  return 0;
}
