#include "gaan/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "gaan/graph.hpp"
#include "gaan/model.hpp"
#include "gaan/tensor.hpp"

namespace gaan {

namespace {

VertexAttr atom(const std::string& element, int valence) { return VertexAttr{element, valence, 0, {}}; }

// Cyclohexane ring with one pendant oxygen: the pendant folds as a leaf and
// the remaining C6 collapses to a surrogate, exercising alpha/beta and
// omega/theta in one step.
AttributedGraph ring_with_pendant() {
  std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}, {2, 6}};
  std::vector<VertexAttr> va;
  for (int i = 0; i < 6; ++i) va.push_back(atom("C", i == 2 ? 3 : 2));
  va.push_back(atom("O", 1));
  std::vector<EdgeAttr> ea(edges.size(), EdgeAttr{BondOrder::Single, true});
  ea[6] = EdgeAttr{BondOrder::Double, false};
  return build_graph(7, edges, va, ea);
}

// N-C-C-O path: first fold trims both leaves, the second merges the
// surviving mutual pair, exercising the symmetric merge coefficient.
AttributedGraph hetero_path() {
  std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}};
  std::vector<VertexAttr> va = {atom("N", 1), atom("C", 2), atom("C", 2), atom("O", 1)};
  std::vector<EdgeAttr> ea = {EdgeAttr{BondOrder::Single, false}, EdgeAttr{BondOrder::Single, false},
                              EdgeAttr{BondOrder::Double, false}};
  return build_graph(4, edges, va, ea);
}

struct Fixture {
  Model model;
  std::vector<PreparedGraph> prep;
  Tensor labels;
  std::vector<bool> is_cls;
};

Fixture make_fixture(std::uint64_t seed) {
  std::vector<AttributedGraph> graphs = {ring_with_pendant(), hetero_path()};
  AttributeSchema schema = AttributeSchema::build(graphs);

  ModelConfig cfg;
  cfg.arch = "GAC(6)-PMF-GAC(5)-PMF-GMP-Tanh";
  cfg.lambda = 0.4;
  cfg.learn_lambda = true;
  cfg.encoder_width = 5;
  cfg.recon_weight = 0.1;
  cfg.seed = seed;
  parse_arch(cfg);

  Model model(cfg, schema, {TaskType::Classification, TaskType::Regression},
              {"cls_task", "reg_task"});

  Fixture fx{std::move(model), {}, Tensor(2, 2), {true, false}};
  for (const AttributedGraph& g : graphs) fx.prep.push_back(fx.model.prepare(g));
  fx.labels.at(0, 0) = 1.0;
  fx.labels.at(0, 1) = 0.7;
  fx.labels.at(1, 0) = 0.0;
  fx.labels.at(1, 1) = std::numeric_limits<double>::quiet_NaN();  // masked entry
  return fx;
}

double loss_value(Fixture& fx, Tape& tape, bool training) {
  std::vector<const PreparedGraph*> batch = {&fx.prep[0], &fx.prep[1]};
  Model::Forward fw = fx.model.forward(tape, batch, training);
  Var loss = tape.multitask_loss(fw.logits, fx.labels, fx.is_cls);
  Var total = tape.add_scaled(loss, fw.recon, fx.model.config().recon_weight);
  tape.backward(total);
  return tape.value(total).at(0, 0);
}

double eval_loss(Fixture& fx) {
  Tape tape;
  std::vector<const PreparedGraph*> batch = {&fx.prep[0], &fx.prep[1]};
  Model::Forward fw = fx.model.forward(tape, batch, /*training=*/true);
  Var loss = tape.multitask_loss(fw.logits, fx.labels, fx.is_cls);
  Var total = tape.add_scaled(loss, fw.recon, fx.model.config().recon_weight);
  return tape.value(total).at(0, 0);
}

}  // namespace

GradCheckReport run_gradcheck(std::uint64_t seed, const std::string& corrupt_class) {
  Fixture fx = make_fixture(seed);
  const double h = 1e-6;
  GradCheckReport report;

  // Analytic pass.
  {
    Tape tape;
    loss_value(fx, tape, /*training=*/true);
    fx.model.pull_grads(tape);
  }
  std::vector<Tensor> analytic = fx.model.last_grads();

  bool corrupted = false;
  std::map<std::string, GradCheckClass> by_class;
  std::vector<ParamEntry>& params = fx.model.params();
  for (int i = 0; i < isize(params); ++i) {
    ParamEntry& p = params[i];
    if (!corrupted && p.cls == corrupt_class) {
      analytic[i][0] += 0.5;
      corrupted = true;
    }
    GradCheckClass& cc = by_class.emplace(p.cls, GradCheckClass{p.cls, 0, 0.0, true}).first->second;
    for (int k = 0; k < p.value.size(); ++k) {
      const double saved = p.value[k];
      p.value[k] = saved + h;
      const double up = eval_loss(fx);
      p.value[k] = saved - h;
      const double down = eval_loss(fx);
      p.value[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double ana = analytic[i][k];
      // Relative error with an absolute floor: vanishing gradients are
      // compared at scale tolerance so finite-difference noise (~1e-10)
      // cannot fail them.
      const double denom = std::max({std::abs(ana), std::abs(numeric), report.tolerance});
      const double rel = std::abs(ana - numeric) / denom;
      cc.max_rel_err = std::max(cc.max_rel_err, rel);
      ++cc.entries;
    }
  }

  for (auto& [cls, cc] : by_class) {
    cc.pass = cc.max_rel_err <= report.tolerance;
    report.pass = report.pass && cc.pass;
    report.classes.push_back(cc);
  }
  return report;
}

std::string format_gradcheck_report(const GradCheckReport& report) {
  std::ostringstream out;
  for (const GradCheckClass& cc : report.classes) {
    std::ostringstream v;
    v.setf(std::ios::scientific);
    v.precision(3);
    v << cc.max_rel_err;
    out << (cc.pass ? "PASS" : "FAIL") << "  " << cc.cls << "  max_rel_err=" << v.str()
        << "  entries=" << cc.entries << '\n';
  }
  out << (report.pass ? "gradcheck passed" : "gradcheck FAILED") << " (tolerance "
      << report.tolerance << ")\n";
  return out.str();
}

}  // namespace gaan
