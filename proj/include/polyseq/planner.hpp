#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polyseq/image.hpp"
#include "polyseq/inverse.hpp"
#include "polyseq/mesh.hpp"
#include "polyseq/reward.hpp"
#include "polyseq/rng.hpp"
#include "polyseq/tps.hpp"

namespace polyseq {

enum class RolloutEstimator { DrFast, TpsFast };

struct PlannerConfig {
  int outer_steps = 12;              // K
  int mcts_iterations = 100;         // per tree
  double exploration = std::sqrt(2.0);
  int rollout_depth = 4;             // N_sim
  RolloutEstimator estimator = RolloutEstimator::DrFast;
  double stop_iou = 0.95;
  RewardWeights weights{};
  std::uint64_t seed = 1;
  OptimConfig optim{};               // committed (full) geometric steps
  int fast_iterations = kFastIterations;
  TpsConfig tps{};
  double extrude_length = 8.0;
  /// End the outer loop when the best committed step would not raise r_all.
  bool stop_on_no_gain = true;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  bool operator==(const PlannerConfig&) const = default;
};

struct SearchChild {
  TopoAction topo;
  GeomAction geom;            // the fast estimate stored in the tree
  std::size_t node = 0;       // index into SearchTree::nodes
  std::size_t action_index = 0;  // position in the parent's enumerated actions
};

struct SearchNode {
  Mesh2D mesh;
  RewardBreakdown reward_here;
  double value_sum = 0.0;
  std::size_t visits = 0;
  int depth = 0;
  std::size_t total_actions = 0;
  std::vector<TopoAction> untried;
  std::vector<std::size_t> untried_index;
  std::vector<SearchChild> children;

  /// Running mean of backpropagated returns; 0 before the first visit.
  double q_value() const { return visits ? value_sum / static_cast<double>(visits) : 0.0; }
};

/// Arena of search nodes; node 0 is the root.
struct SearchTree {
  std::vector<SearchNode> nodes;

  SearchTree(const Mesh2D& root, const Image& target, const PlannerConfig& cfg);
  SearchNode& root() { return nodes.front(); }
  const SearchNode& root() const { return nodes.front(); }
};

/// States scored per iteration below the root: the tree path plus the rollout
/// always add up to rollout_depth + 1.
int search_horizon(const PlannerConfig& cfg);

/// A node is not expanded further once it matches the target, reaches the
/// horizon, or has no valid actions.
bool is_terminal(const SearchNode& node, const PlannerConfig& cfg);

/// Geometric step for a mesh whose topology was just edited: the full
/// estimator for committed steps, otherwise the configured rollout estimator.
/// Estimator failures yield a zero displacement.
GeomAction estimate_geometry(const Mesh2D& mesh, const Image& target, const PlannerConfig& cfg, bool full);

/// UCT: argmax of q + c sqrt(ln N_parent / N_child), ties to the lowest child
/// index. Throws std::logic_error if the node still has untried actions or no
/// children.
std::size_t uct_select(const SearchTree& tree, std::size_t node, double c);

/// Removes a uniformly random untried action, applies it with the rollout
/// estimator and appends the resulting child. Returns its node index.
std::size_t expand(SearchTree& tree, std::size_t node, const Image& target, const PlannerConfig& cfg, Rng& rng);

/// Random rollout of up to `steps` edits from `mesh` (whose reward is `here`),
/// summing r_all of every visited state. A state that matches the target is
/// absorbing: its reward is repeated for the remaining steps.
double simulate(const Mesh2D& mesh, const RewardBreakdown& here, const Image& target, const PlannerConfig& cfg,
                int steps, Rng& rng);

/// Adds `value` to every node on the path and bumps its visit count.
void backpropagate(SearchTree& tree, std::span<const std::size_t> path, double value);

/// Runs the given number of select / expand / simulate / backpropagate
/// iterations. `tree_index` keys the random streams.
void grow_tree(SearchTree& tree, const Image& target, const PlannerConfig& cfg, std::uint64_t tree_index);

struct PlanStep {
  TopoAction topo;
  GeomAction geom;                 // full estimate on apply_topo(mesh, topo)
  std::size_t action_index = 0;
  std::vector<double> root_q;      // q of every root child, by expansion order
  std::size_t chosen = 0;          // position of the selected child in root_q
};

/// Grows a fresh tree at `mesh`, picks the root child with the highest q
/// (ties to the lowest action index), and recomputes its geometric step with
/// the full estimator. Empty when the mesh has no valid action.
std::optional<PlanStep> plan_one_step(const Mesh2D& mesh, const Image& target, const PlannerConfig& cfg,
                                      std::uint64_t tree_index = 0);

struct SequenceStep {
  TopoAction topo;
  GeomAction geom;
  RewardBreakdown reward;  // of the state after this step
  bool operator==(const SequenceStep&) const = default;
};

struct ConstructionSequence {
  Mesh2D initial;
  std::vector<SequenceStep> steps;
  Mesh2D final_mesh;
};

/// Applies every (topo, geom) step to the initial mesh.
Mesh2D replay(const ConstructionSequence& seq);

/// Outer loop: plan, commit, repeat up to outer_steps times; stops early once
/// the shape matches (r_sm >= stop_iou), when no action exists, or (with
/// stop_on_no_gain) when the planned step would not increase r_all.
ConstructionSequence solve(const Mesh2D& initial, const Image& target, const PlannerConfig& cfg);

}  // namespace polyseq
