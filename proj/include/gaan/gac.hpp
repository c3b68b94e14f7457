#pragma once

#include <random>
#include <utility>
#include <vector>

#include "gaan/graph.hpp"
#include "gaan/tensor.hpp"

namespace gaan {

// Per-attribute-group affine transforms. Index i < p transforms the vertex
// rows of group i; index j < q the edge rows of group j. All groups share
// one output width.
struct GacParams {
  std::vector<Tensor> w_v;  // p matrices, d_v_in x d_out
  std::vector<Tensor> b_v;  // p rows, 1 x d_out
  std::vector<Tensor> w_e;  // q matrices, d_e_in x d_out
  std::vector<Tensor> b_e;  // q rows, 1 x d_out
  double lambda = 0.5;      // fusion coefficient in [0, 1]
};

struct GacOutput {
  Tensor x_v_out;  // n x d_out
  Tensor x_e_out;  // m x d_out
  Tensor x_fused;  // n x d_out
};

// Group index per vertex and per edge under the frozen schema; tuples not in
// the schema land in the reserved unknown group.
std::pair<std::vector<int>, std::vector<int>> classify_elements(const AttributedGraph& g,
                                                                const AttributeSchema& schema);

// One convolution: each row transformed by its group's affine map, then the
// fused vertex feature lambda * X_V_out + (1 - lambda) * (incident-edge mean
// of X_E_out). Isolated vertices take a zero edge term. No activation here.
GacOutput gac_forward(const AttributedGraph& g, const GacParams& params,
                      const AttributeSchema& schema);

// Zero-mean scaled-uniform init with bound 1/sqrt(fan_in); biases zero.
GacParams init_gac_params(const AttributeSchema& schema, int d_v_in, int d_e_in, int d_out,
                          std::mt19937_64& rng);

// Uniform draw in [-bound, bound] from raw generator output; used everywhere
// weights are initialized so runs are reproducible across platforms.
double uniform_symmetric(std::mt19937_64& rng, double bound);

// Tape-side parameter handles for one GAC layer.
struct GacLayerVars {
  std::vector<Var> w_v;
  std::vector<Var> b_v;
  std::vector<Var> w_e;
  std::vector<Var> b_e;
  Var lambda;  // 1x1, already in [0, 1]
};

struct GacVarOutput {
  Var x_v_out;
  Var x_e_out;
  Var x_fused;
};

// Tape mirror of gac_forward for the given group assignment.
GacVarOutput gac_forward_tape(Tape& t, Var x_v, Var x_e, const std::vector<int>& vertex_group,
                              const std::vector<int>& edge_group,
                              const std::vector<std::vector<int>>& incident,
                              const GacLayerVars& params);

}  // namespace gaan
