#pragma once

#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "gaan/graph.hpp"
#include "gaan/margin.hpp"
#include "gaan/tensor.hpp"

namespace gaan {

struct FoldParams {
  double alpha = 1.0;
  double beta = 1.0;
};

struct RingCollapseParams {
  double omega = 1.0;
  double theta = 1.0;
};

struct HyperVertex {
  int id = 0;
  std::vector<int> members;  // sorted ancestor vertex ids
  int born_level = 0;
};

// One linear graph restructuring. Every output vertex row is a weighted sum
// of input rows; the weight of each list is the named coefficient. Keeping
// the recipe symbolic lets the same plan drive both the plain matrix path
// and the gradient tape path.
struct RestructurePlan {
  bool identity = false;
  std::vector<std::vector<int>> unit_v;    // coefficient 1 (surviving vertices)
  std::vector<std::vector<int>> alpha_v;   // coefficient alpha (folded leaves)
  std::vector<std::vector<int>> beta_e;    // coefficient beta (folded leaf edges)
  std::vector<std::vector<int>> mutual_v;  // coefficient (1+alpha)/2 (mutual-leaf pair)
  std::vector<std::vector<int>> omega_v;   // coefficient omega (collapsed ring vertices)
  std::vector<std::vector<int>> theta_e;   // coefficient theta (collapsed ring edges)
  std::vector<int> edge_src;               // output edge id -> input edge id
  std::vector<std::vector<int>> members;   // output vertex -> absorbed input vertices
  AttributedGraph topology;                // output graph, zero-width features

  bool has_alpha() const;
  bool has_mutual() const;
  bool has_ring() const;
};

// Leaf phase: fold each marginal leaf into its inner neighbor (mutual-leaf
// P2 components merge symmetrically) and trim the folded elements.
RestructurePlan plan_leaf_fold(const AttributedGraph& g, const MarginalStructure& ms);

// Collapse phase: replace every ring unit with at most one external branch
// edge by a single surrogate vertex.
RestructurePlan plan_ring_collapse(const AttributedGraph& g, const RingSystem& rings);

// True iff at most one edge leaves the unit.
bool should_collapse_ring(const AttributedGraph& g, const RingSystem& rings, int unit);

// Surrogate feature of one unit: omega * sum of unit vertex rows plus
// theta * sum of intra-unit edge rows. Asserts the collapse condition.
std::pair<Tensor, HyperVertex> collapse_ring(const AttributedGraph& g, const RingSystem& rings,
                                             int unit, const RingCollapseParams& rp);

// Apply a plan to plain feature matrices.
AttributedGraph apply_restructure(const AttributedGraph& g, const RestructurePlan& plan,
                                  const FoldParams& fp, const RingCollapseParams& rp);

// Apply a plan on the tape. alpha/beta/omega/theta are 1x1 vars; unused
// coefficient classes may be invalid vars when the plan has no such rows.
Var fold_vertex_features(Tape& t, const RestructurePlan& plan, Var x_v, Var x_e, Var alpha,
                         Var beta, Var omega, Var theta);
Var fold_edge_features(Tape& t, const RestructurePlan& plan, Var x_e);

struct FoldStepResult {
  AttributedGraph graph;
  std::vector<HyperVertex> hypermap;  // members are input-graph vertex ids
  bool changed = false;
  RestructurePlan leaf_plan;
  RestructurePlan collapse_plan;
};

// One folding iteration: leaves fold first, then ring collapse eligibility
// is evaluated on the trimmed graph within the same iteration. With nothing
// to fold, returns the input unchanged under an identity map.
FoldStepResult fold_step(const AttributedGraph& g, const MarginalStructure& ms,
                         const RingSystem& rings, const FoldParams& fp,
                         const RingCollapseParams& rp);

struct FoldingLevel {
  AttributedGraph graph;
  std::vector<HyperVertex> hypermap;  // members are level-0 vertex ids
  RingSystem rings;
  MarginalStructure marginal;
  bool fixpoint = false;  // produced as an identity pass-through
  // Plans that turn this level into the next one (identity at the top).
  RestructurePlan leaf_plan;
  RestructurePlan collapse_plan;
};

struct FoldingPyramid {
  std::vector<FoldingLevel> levels;  // h_max + 1 entries, levels[0] = input
  int h_max = 0;
};

// Per-level feature transform (e.g. a convolution block) applied to a level
// before folding it; must preserve topology. Null means identity.
using FeatureFn = std::function<AttributedGraph(const AttributedGraph&, int level)>;

// Builds layer_params.size() folding levels above the input graph. Level
// h+1 is fold_step(feature_fn(level h)). Fold structure depends only on
// topology, so each level's plans can be replayed against other feature
// matrices (plain or on the tape).
FoldingPyramid build_pyramid(const AttributedGraph& g,
                             const std::vector<std::pair<FoldParams, RingCollapseParams>>& layers,
                             const FeatureFn& feature_fn = nullptr);

// Transitive member closure down to level 0.
std::set<int> expand_provenance(const FoldingPyramid& p, int level, int v);

// Union of one-step member maps: members of f through mid-level map a.
std::vector<std::vector<int>> compose_members(const std::vector<std::vector<int>>& a,
                                              const std::vector<std::vector<int>>& b);

}  // namespace gaan
