#include "gaan/fold.hpp"

#include <algorithm>
#include <cassert>
#include <map>

#include "gaan/error.hpp"

namespace gaan {

namespace {

bool any_rows(const std::vector<std::vector<int>>& lists) {
  for (const auto& l : lists) {
    if (!l.empty()) return true;
  }
  return false;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Sum the listed rows of src into dst row i, scaled by c.
void accumulate_rows(Tensor& dst, int i, const Tensor& src, const std::vector<int>& rows,
                     double c) {
  for (int r : rows) {
    for (int k = 0; k < src.cols(); ++k) dst.at(i, k) += c * src.at(r, k);
  }
}

}  // namespace

bool RestructurePlan::has_alpha() const { return any_rows(alpha_v); }
bool RestructurePlan::has_mutual() const { return any_rows(mutual_v); }
bool RestructurePlan::has_ring() const { return any_rows(omega_v) || any_rows(theta_e); }

RestructurePlan plan_leaf_fold(const AttributedGraph& g, const MarginalStructure& ms) {
  RestructurePlan plan;
  if (ms.marginal_leaf_vertices.empty()) {
    plan.identity = true;
    return plan;
  }
  const auto& leaves = ms.marginal_leaf_vertices;
  auto is_leaf = [&](int v) { return leaves.count(v) > 0; };

  // Assign new ids: survivors keep their relative order; a mutual-leaf pair
  // (an isolated edge, both ends marginal) merges into one vertex placed at
  // the smaller endpoint's slot.
  std::vector<int> new_id(g.n, -1);
  int n_out = 0;
  std::vector<VertexAttr> attrs;
  std::vector<std::vector<int>> members;
  for (int v = 0; v < g.n; ++v) {
    if (!is_leaf(v)) {
      new_id[v] = n_out++;
      attrs.push_back(g.vertex_attrs[v]);
      members.push_back({v});
      continue;
    }
    int e = g.incident[v][0];
    int u = g.other_end(e, v);
    if (!is_leaf(u)) continue;  // folds into u, allocated on its own pass
    if (u > v) {                // mutual pair, smaller endpoint allocates
      new_id[v] = n_out;
      new_id[u] = n_out;
      ++n_out;
      attrs.push_back(std::min(g.vertex_attrs[v], g.vertex_attrs[u]));
      members.push_back({v, u});
    }
  }

  plan.unit_v.assign(n_out, {});
  plan.alpha_v.assign(n_out, {});
  plan.beta_e.assign(n_out, {});
  plan.mutual_v.assign(n_out, {});
  plan.omega_v.assign(n_out, {});
  plan.theta_e.assign(n_out, {});
  plan.members = std::move(members);

  for (int v = 0; v < g.n; ++v) {
    if (!is_leaf(v)) {
      plan.unit_v[new_id[v]].push_back(v);
      continue;
    }
    int e = g.incident[v][0];
    int u = g.other_end(e, v);
    if (is_leaf(u)) {
      if (u > v) {  // record the pair once
        int t = new_id[v];
        plan.mutual_v[t] = {v, u};
        plan.beta_e[t].push_back(e);
      }
    } else {
      int t = new_id[u];
      plan.alpha_v[t].push_back(v);
      plan.beta_e[t].push_back(e);
      plan.members[t].push_back(v);
    }
  }
  for (auto& m : plan.members) m = sorted_unique(std::move(m));

  std::vector<std::pair<int, int>> edges;
  std::vector<EdgeAttr> edge_attrs;
  for (int e = 0; e < g.m(); ++e) {
    if (ms.marginal_leaf_edges.count(e)) continue;
    auto [u, v] = g.edges[e];
    edges.emplace_back(new_id[u], new_id[v]);
    edge_attrs.push_back(g.edge_attrs[e]);
    plan.edge_src.push_back(e);
  }
  plan.topology = build_graph(n_out, edges, attrs, edge_attrs);
  return plan;
}

bool should_collapse_ring(const AttributedGraph& g, const RingSystem& rings, int unit) {
  const auto uv = rings.unit_vertices(unit);
  int branches = 0;
  for (int e = 0; e < g.m(); ++e) {
    auto [a, b] = g.edges[e];
    if (uv.count(a) + uv.count(b) == 1) ++branches;
  }
  return branches <= 1;
}

RestructurePlan plan_ring_collapse(const AttributedGraph& g, const RingSystem& rings) {
  RestructurePlan plan;
  std::vector<int> collapsing;
  for (int u = 0; u < rings.unit_count; ++u) {
    if (should_collapse_ring(g, rings, u)) collapsing.push_back(u);
  }
  if (collapsing.empty()) {
    plan.identity = true;
    return plan;
  }

  // unit_of[v] = index into `collapsing` when v belongs to a collapsing unit.
  std::vector<int> unit_of(g.n, -1);
  for (size_t i = 0; i < collapsing.size(); ++i) {
    for (int v : rings.unit_vertices(collapsing[i])) unit_of[v] = static_cast<int>(i);
  }

  std::vector<int> new_id(g.n, -1);
  int n_out = 0;
  std::vector<VertexAttr> attrs;
  for (int v = 0; v < g.n; ++v) {
    if (unit_of[v] >= 0) continue;
    new_id[v] = n_out++;
    attrs.push_back(g.vertex_attrs[v]);
    plan.members.push_back({v});
  }
  std::vector<int> surrogate_id(collapsing.size());
  for (size_t i = 0; i < collapsing.size(); ++i) {
    surrogate_id[i] = n_out++;
    attrs.push_back(ring_surrogate_attr());
    auto uv = rings.unit_vertices(collapsing[i]);
    plan.members.emplace_back(uv.begin(), uv.end());
  }
  for (int v = 0; v < g.n; ++v) {
    if (unit_of[v] >= 0) new_id[v] = surrogate_id[unit_of[v]];
  }

  plan.unit_v.assign(n_out, {});
  plan.alpha_v.assign(n_out, {});
  plan.beta_e.assign(n_out, {});
  plan.mutual_v.assign(n_out, {});
  plan.omega_v.assign(n_out, {});
  plan.theta_e.assign(n_out, {});
  for (int v = 0; v < g.n; ++v) {
    if (unit_of[v] >= 0) {
      plan.omega_v[new_id[v]].push_back(v);
    } else {
      plan.unit_v[new_id[v]].push_back(v);
    }
  }

  std::vector<std::pair<int, int>> edges;
  std::vector<EdgeAttr> edge_attrs;
  for (int e = 0; e < g.m(); ++e) {
    auto [a, b] = g.edges[e];
    int na = new_id[a];
    int nb = new_id[b];
    if (na == nb) {  // swallowed by the surrogate
      plan.theta_e[na].push_back(e);
      continue;
    }
    edges.emplace_back(na, nb);
    edge_attrs.push_back(g.edge_attrs[e]);
    plan.edge_src.push_back(e);
  }
  plan.topology = build_graph(n_out, edges, attrs, edge_attrs);
  return plan;
}

std::pair<Tensor, HyperVertex> collapse_ring(const AttributedGraph& g, const RingSystem& rings,
                                             int unit, const RingCollapseParams& rp) {
  assert(should_collapse_ring(g, rings, unit));
  if (g.x_v.cols() != g.x_e.cols()) {
    throw Error(Error::Kind::DimensionMismatch,
                "ring collapse needs matching vertex/edge feature widths");
  }
  const auto uv = rings.unit_vertices(unit);
  Tensor row(1, g.x_v.cols());
  HyperVertex h;
  h.members.assign(uv.begin(), uv.end());
  accumulate_rows(row, 0, g.x_v, h.members, rp.omega);
  accumulate_rows(row, 0, g.x_e, rings.unit_edges(g, unit), rp.theta);
  return {std::move(row), std::move(h)};
}

AttributedGraph apply_restructure(const AttributedGraph& g, const RestructurePlan& plan,
                                  const FoldParams& fp, const RingCollapseParams& rp) {
  if (plan.identity) return g;
  const bool mixes_edges =
      any_rows(plan.beta_e) || any_rows(plan.theta_e);
  if (mixes_edges && g.x_v.cols() != g.x_e.cols()) {
    throw Error(Error::Kind::DimensionMismatch,
                "folding needs matching vertex/edge feature widths");
  }
  AttributedGraph out = plan.topology;
  const int n_out = out.n;
  const int d = g.x_v.cols();
  out.x_v = Tensor(n_out, d);
  const double mutual_c = 0.5 * (1.0 + fp.alpha);
  for (int i = 0; i < n_out; ++i) {
    accumulate_rows(out.x_v, i, g.x_v, plan.unit_v[i], 1.0);
    accumulate_rows(out.x_v, i, g.x_v, plan.alpha_v[i], fp.alpha);
    accumulate_rows(out.x_v, i, g.x_e, plan.beta_e[i], fp.beta);
    accumulate_rows(out.x_v, i, g.x_v, plan.mutual_v[i], mutual_c);
    accumulate_rows(out.x_v, i, g.x_v, plan.omega_v[i], rp.omega);
    accumulate_rows(out.x_v, i, g.x_e, plan.theta_e[i], rp.theta);
  }
  out.x_e = Tensor(out.m(), g.x_e.cols());
  for (int j = 0; j < out.m(); ++j) {
    for (int k = 0; k < g.x_e.cols(); ++k) out.x_e.at(j, k) = g.x_e.at(plan.edge_src[j], k);
  }
  return out;
}

Var fold_vertex_features(Tape& t, const RestructurePlan& plan, Var x_v, Var x_e, Var alpha,
                         Var beta, Var omega, Var theta) {
  if (plan.identity) return x_v;
  Var acc = t.gather_sum_rows(x_v, plan.unit_v);
  if (any_rows(plan.alpha_v)) {
    acc = t.add(acc, t.scale_var(t.gather_sum_rows(x_v, plan.alpha_v), alpha));
  }
  if (any_rows(plan.beta_e)) {
    acc = t.add(acc, t.scale_var(t.gather_sum_rows(x_e, plan.beta_e), beta));
  }
  if (any_rows(plan.mutual_v)) {
    Var half = t.affine(alpha, 0.5, 0.5);  // (1 + alpha) / 2
    acc = t.add(acc, t.scale_var(t.gather_sum_rows(x_v, plan.mutual_v), half));
  }
  if (any_rows(plan.omega_v)) {
    acc = t.add(acc, t.scale_var(t.gather_sum_rows(x_v, plan.omega_v), omega));
  }
  if (any_rows(plan.theta_e)) {
    acc = t.add(acc, t.scale_var(t.gather_sum_rows(x_e, plan.theta_e), theta));
  }
  return acc;
}

Var fold_edge_features(Tape& t, const RestructurePlan& plan, Var x_e) {
  if (plan.identity) return x_e;
  return t.gather_rows(x_e, plan.edge_src);
}

std::vector<std::vector<int>> compose_members(const std::vector<std::vector<int>>& a,
                                              const std::vector<std::vector<int>>& b) {
  std::vector<std::vector<int>> out(b.size());
  for (size_t f = 0; f < b.size(); ++f) {
    std::vector<int> acc;
    for (int mid : b[f]) acc.insert(acc.end(), a[mid].begin(), a[mid].end());
    out[f] = sorted_unique(std::move(acc));
  }
  return out;
}

FoldStepResult fold_step(const AttributedGraph& g, const MarginalStructure& ms,
                         const RingSystem& rings, const FoldParams& fp,
                         const RingCollapseParams& rp) {
  RestructurePlan leaf = plan_leaf_fold(g, ms);
  AttributedGraph g1 = apply_restructure(g, leaf, fp, rp);
  // Leaf trimming can strip a ring system's last branch, so collapse
  // eligibility is judged on the trimmed graph within the same iteration.
  RingSystem rings1 = leaf.identity ? rings : find_cycle_basis(g1);
  RestructurePlan collapse = plan_ring_collapse(g1, rings1);
  AttributedGraph g2 = apply_restructure(g1, collapse, fp, rp);

  FoldStepResult res;
  res.changed = !leaf.identity || !collapse.identity;
  res.graph = std::move(g2);
  std::vector<std::vector<int>> members;
  if (leaf.identity && collapse.identity) {
    members.resize(g.n);
    for (int v = 0; v < g.n; ++v) members[v] = {v};
  } else if (leaf.identity) {
    members = collapse.members;
  } else if (collapse.identity) {
    members = leaf.members;
  } else {
    members = compose_members(leaf.members, collapse.members);
  }
  res.hypermap.resize(members.size());
  for (size_t v = 0; v < members.size(); ++v) {
    res.hypermap[v].id = static_cast<int>(v);
    res.hypermap[v].members = std::move(members[v]);
  }
  res.leaf_plan = std::move(leaf);
  res.collapse_plan = std::move(collapse);
  return res;
}

FoldingPyramid build_pyramid(const AttributedGraph& g,
                             const std::vector<std::pair<FoldParams, RingCollapseParams>>& layers,
                             const FeatureFn& feature_fn) {
  const int h_max = static_cast<int>(layers.size());
  FoldingPyramid p;
  p.h_max = h_max;
  p.levels.resize(h_max + 1);

  FoldingLevel& base = p.levels[0];
  base.graph = g;
  base.rings = find_cycle_basis(g);
  base.marginal = get_marginal_structure(g, base.rings);
  base.hypermap.resize(g.n);
  for (int v = 0; v < g.n; ++v) {
    base.hypermap[v].id = v;
    base.hypermap[v].members = {v};
  }

  for (int h = 0; h < h_max; ++h) {
    FoldingLevel& cur = p.levels[h];
    FoldingLevel& next = p.levels[h + 1];
    const auto& [fp, rp] = layers[h];
    FoldStepResult step =
        feature_fn ? fold_step(feature_fn(cur.graph, h), cur.marginal, cur.rings, fp, rp)
                   : fold_step(cur.graph, cur.marginal, cur.rings, fp, rp);
    cur.leaf_plan = std::move(step.leaf_plan);
    cur.collapse_plan = std::move(step.collapse_plan);
    next.graph = std::move(step.graph);
    next.fixpoint = !step.changed;
    next.rings = find_cycle_basis(next.graph);
    next.marginal = get_marginal_structure(next.graph, next.rings);
    next.hypermap.resize(step.hypermap.size());
    for (size_t v = 0; v < step.hypermap.size(); ++v) {
      std::vector<int> acc;
      for (int mid : step.hypermap[v].members) {
        const auto& anc = cur.hypermap[mid].members;
        acc.insert(acc.end(), anc.begin(), anc.end());
      }
      next.hypermap[v].id = static_cast<int>(v);
      next.hypermap[v].members = sorted_unique(std::move(acc));
      next.hypermap[v].born_level =
          next.hypermap[v].members == cur.hypermap[step.hypermap[v].members[0]].members
              ? cur.hypermap[step.hypermap[v].members[0]].born_level
              : h + 1;
    }
  }
  return p;
}

std::set<int> expand_provenance(const FoldingPyramid& p, int level, int v) {
  const auto& m = p.levels.at(level).hypermap.at(v).members;
  return std::set<int>(m.begin(), m.end());
}

}  // namespace gaan
