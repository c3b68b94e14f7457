#include "gaan/gac.hpp"

#include <cmath>

#include "gaan/error.hpp"

namespace gaan {

namespace {

void check_widths(const std::vector<Tensor>& w, const std::vector<Tensor>& b, int d_in,
                  const char* side) {
  if (w.empty() || w.size() != b.size()) {
    throw Error(Error::Kind::DimensionMismatch, std::string(side) + ": bad group count");
  }
  const int d_out = w[0].cols();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].rows() != d_in || w[i].cols() != d_out || b[i].rows() != 1 ||
        b[i].cols() != d_out) {
      throw Error(Error::Kind::DimensionMismatch,
                  std::string(side) + ": group " + std::to_string(i) + " shape mismatch");
    }
  }
}

// dst row i = src row r * w + b
void transform_row(Tensor& dst, int i, const Tensor& src, int r, const Tensor& w,
                   const Tensor& b) {
  for (int c = 0; c < w.cols(); ++c) {
    double acc = b.at(0, c);
    for (int k = 0; k < w.rows(); ++k) acc += src.at(r, k) * w.at(k, c);
    dst.at(i, c) = acc;
  }
}

}  // namespace

std::pair<std::vector<int>, std::vector<int>> classify_elements(const AttributedGraph& g,
                                                                const AttributeSchema& schema) {
  std::vector<int> vg(g.n);
  for (int v = 0; v < g.n; ++v) vg[v] = schema.vertex_group_of(g.vertex_attrs[v]);
  std::vector<int> eg(g.m());
  for (int e = 0; e < g.m(); ++e) eg[e] = schema.edge_group_of(g.edge_attrs[e]);
  return {std::move(vg), std::move(eg)};
}

GacOutput gac_forward(const AttributedGraph& g, const GacParams& params,
                      const AttributeSchema& schema) {
  if (isize(params.w_v) != schema.p() || isize(params.w_e) != schema.q()) {
    throw Error(Error::Kind::DimensionMismatch, "parameter group count differs from schema");
  }
  check_widths(params.w_v, params.b_v, g.x_v.cols(), "vertex transform");
  check_widths(params.w_e, params.b_e, g.x_e.cols(), "edge transform");
  const int d_out = params.w_v[0].cols();
  if (params.w_e[0].cols() != d_out) {
    throw Error(Error::Kind::DimensionMismatch, "vertex and edge output widths differ");
  }

  auto [vgroup, egroup] = classify_elements(g, schema);
  GacOutput out;
  out.x_v_out = Tensor(g.n, d_out);
  for (int v = 0; v < g.n; ++v) {
    transform_row(out.x_v_out, v, g.x_v, v, params.w_v[vgroup[v]], params.b_v[vgroup[v]]);
  }
  out.x_e_out = Tensor(g.m(), d_out);
  for (int e = 0; e < g.m(); ++e) {
    transform_row(out.x_e_out, e, g.x_e, e, params.w_e[egroup[e]], params.b_e[egroup[e]]);
  }
  out.x_fused = Tensor(g.n, d_out);
  for (int v = 0; v < g.n; ++v) {
    const auto& inc = g.incident[v];
    for (int c = 0; c < d_out; ++c) {
      double edge_mean = 0.0;
      for (int e : inc) edge_mean += out.x_e_out.at(e, c);
      if (!inc.empty()) edge_mean /= static_cast<double>(inc.size());
      out.x_fused.at(v, c) =
          params.lambda * out.x_v_out.at(v, c) + (1.0 - params.lambda) * edge_mean;
    }
  }
  return out;
}

double uniform_symmetric(std::mt19937_64& rng, double bound) {
  // 53 random mantissa bits -> [0, 1), then stretch to [-bound, bound].
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return (2.0 * u - 1.0) * bound;
}

GacParams init_gac_params(const AttributeSchema& schema, int d_v_in, int d_e_in, int d_out,
                          std::mt19937_64& rng) {
  GacParams p;
  p.lambda = 0.5;
  auto fill_side = [&](std::vector<Tensor>& w, std::vector<Tensor>& b, int groups, int d_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1, d_in)));
    for (int i = 0; i < groups; ++i) {
      Tensor wi(d_in, d_out);
      for (int k = 0; k < wi.size(); ++k) wi[k] = uniform_symmetric(rng, bound);
      w.push_back(std::move(wi));
      b.push_back(Tensor(1, d_out));
    }
  };
  fill_side(p.w_v, p.b_v, schema.p(), d_v_in);
  fill_side(p.w_e, p.b_e, schema.q(), d_e_in);
  return p;
}

GacVarOutput gac_forward_tape(Tape& t, Var x_v, Var x_e, const std::vector<int>& vertex_group,
                              const std::vector<int>& edge_group,
                              const std::vector<std::vector<int>>& incident,
                              const GacLayerVars& params) {
  const int d_out = t.value(params.w_v[0]).cols();

  auto transform_side = [&](Var x, const std::vector<int>& group, const std::vector<Var>& w,
                            const std::vector<Var>& b, int rows) -> Var {
    std::vector<std::vector<int>> rows_of(w.size());
    for (int r = 0; r < rows; ++r) rows_of[group[r]].push_back(r);
    Var acc;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (rows_of[i].empty()) continue;
      Var piece = t.add_row(t.matmul(t.gather_rows(x, rows_of[i]), w[i]), b[i]);
      Var spread = t.scatter_rows(piece, rows_of[i], rows);
      acc = acc.valid() ? t.add(acc, spread) : spread;
    }
    if (!acc.valid()) acc = t.input(Tensor(rows, d_out));  // no rows on this side
    return acc;
  };

  GacVarOutput out;
  const int n = isize(vertex_group);
  const int m = isize(edge_group);
  out.x_v_out = transform_side(x_v, vertex_group, params.w_v, params.b_v, n);
  out.x_e_out = transform_side(x_e, edge_group, params.w_e, params.b_e, m);

  std::vector<double> inv_deg(n, 0.0);
  for (int v = 0; v < n; ++v) {
    if (!incident[v].empty()) inv_deg[v] = 1.0 / static_cast<double>(incident[v].size());
  }
  Var edge_mean = t.scale_rows(t.gather_sum_rows(out.x_e_out, incident), inv_deg);
  Var one_minus_lambda = t.affine(params.lambda, -1.0, 1.0);
  out.x_fused = t.add(t.scale_var(out.x_v_out, params.lambda),
                      t.scale_var(edge_mean, one_minus_lambda));
  return out;
}

}  // namespace gaan
