#include "polyseq/planner.hpp"

#include <limits>
#include <stdexcept>

namespace polyseq {

void PlannerConfig::validate() const {
  if (outer_steps < 1) throw std::invalid_argument("outer_steps must be >= 1");
  if (mcts_iterations < 1) throw std::invalid_argument("mcts_iterations must be >= 1");
  if (!(exploration >= 0.0) || !std::isfinite(exploration)) throw std::invalid_argument("exploration must be >= 0");
  if (rollout_depth < 0) throw std::invalid_argument("rollout_depth must be >= 0");
  if (!(stop_iou > 0.0 && stop_iou <= 1.0)) throw std::invalid_argument("stop_iou must lie in (0, 1]");
  if (fast_iterations < 1) throw std::invalid_argument("fast_iterations must be >= 1");
  if (tps.grid_size < 2 || tps.iterations < 1) throw std::invalid_argument("invalid TPS settings");
  if (!(extrude_length > 0.0) || !std::isfinite(extrude_length)) throw std::invalid_argument("extrude_length must be positive");
  weights.validate();
  optim.validate();
}

namespace {

SearchNode make_node(const Mesh2D& mesh, const Image& target, const PlannerConfig& cfg, int depth) {
  SearchNode node{mesh, compute_reward(mesh, target, cfg.weights), 0.0, 0, depth, 0, {}, {}, {}};
  node.untried = enumerate_valid_actions(mesh, cfg.extrude_length);
  node.total_actions = node.untried.size();
  node.untried_index.resize(node.untried.size());
  for (std::size_t i = 0; i < node.untried_index.size(); ++i) node.untried_index[i] = i;
  return node;
}

}  // namespace

SearchTree::SearchTree(const Mesh2D& root, const Image& target, const PlannerConfig& cfg) {
  nodes.push_back(make_node(root, target, cfg, 0));
}

int search_horizon(const PlannerConfig& cfg) { return cfg.rollout_depth + 1; }

bool is_terminal(const SearchNode& node, const PlannerConfig& cfg) {
  return node.reward_here.r_sm >= cfg.stop_iou || node.depth >= search_horizon(cfg) || node.total_actions == 0;
}

GeomAction estimate_geometry(const Mesh2D& mesh, const Image& target, const PlannerConfig& cfg, bool full) {
  try {
    if (full) return estimate(mesh, target, cfg.optim).geom;
    if (cfg.estimator == RolloutEstimator::TpsFast) return fast_estimate(mesh, target, cfg.tps, cfg.optim.sigma);
    return estimate_fast(mesh, target, cfg.optim, cfg.fast_iterations).geom;
  } catch (const std::exception&) {
    return GeomAction{std::vector<Vec2>(mesh.num_vertices())};
  }
}

std::size_t uct_select(const SearchTree& tree, std::size_t node, double c) {
  const SearchNode& n = tree.nodes.at(node);
  if (!n.untried.empty()) throw std::logic_error("uct_select: node still has untried actions");
  if (n.children.empty()) throw std::logic_error("uct_select: node has no children");
  const double log_parent = std::log(static_cast<double>(std::max<std::size_t>(n.visits, 1)));
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    const SearchNode& child = tree.nodes[n.children[i].node];
    const double visits = static_cast<double>(std::max<std::size_t>(child.visits, 1));
    const double score = child.q_value() + c * std::sqrt(log_parent / visits);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::size_t expand(SearchTree& tree, std::size_t node, const Image& target, const PlannerConfig& cfg, Rng& rng) {
  SearchNode& parent = tree.nodes.at(node);
  if (parent.untried.empty()) throw std::logic_error("expand: no untried actions");
  const auto pick = static_cast<std::size_t>(rng.below(parent.untried.size()));
  const TopoAction action = parent.untried[pick];
  const std::size_t action_index = parent.untried_index[pick];
  parent.untried.erase(parent.untried.begin() + static_cast<std::ptrdiff_t>(pick));
  parent.untried_index.erase(parent.untried_index.begin() + static_cast<std::ptrdiff_t>(pick));
  const Mesh2D edited = apply_topo(parent.mesh, action);
  GeomAction geom = estimate_geometry(edited, target, cfg, false);
  const Mesh2D moved = apply_geom(edited, geom);
  const int depth = parent.depth + 1;
  const std::size_t index = tree.nodes.size();
  tree.nodes.push_back(make_node(moved, target, cfg, depth));
  // push_back may reallocate; re-acquire the parent.
  tree.nodes[node].children.push_back({action, std::move(geom), index, action_index});
  return index;
}

double simulate(const Mesh2D& mesh, const RewardBreakdown& here, const Image& target, const PlannerConfig& cfg,
                int steps, Rng& rng) {
  double total = 0.0;
  Mesh2D current = mesh;
  RewardBreakdown reward = here;
  for (int s = 0; s < steps; ++s) {
    const auto actions = reward.r_sm >= cfg.stop_iou ? std::vector<TopoAction>{}
                                                     : enumerate_valid_actions(current, cfg.extrude_length);
    if (actions.empty()) {
      total += static_cast<double>(steps - s) * reward.r_all;
      break;
    }
    const TopoAction& action = actions[static_cast<std::size_t>(rng.below(actions.size()))];
    const Mesh2D edited = apply_topo(current, action);
    current = apply_geom(edited, estimate_geometry(edited, target, cfg, false));
    reward = compute_reward(current, target, cfg.weights);
    total += reward.r_all;
  }
  return total;
}

void backpropagate(SearchTree& tree, std::span<const std::size_t> path, double value) {
  for (std::size_t n : path) {
    SearchNode& node = tree.nodes.at(n);
    node.value_sum += value;
    ++node.visits;
  }
}

void grow_tree(SearchTree& tree, const Image& target, const PlannerConfig& cfg, std::uint64_t tree_index) {
  const int horizon = search_horizon(cfg);
  std::vector<std::size_t> path;
  for (int it = 0; it < cfg.mcts_iterations; ++it) {
    Rng rng(derive_seed({cfg.seed, tree_index, static_cast<std::uint64_t>(it)}));
    path.assign(1, 0);
    std::size_t n = 0;
    while (!is_terminal(tree.nodes[n], cfg) && tree.nodes[n].untried.empty() && !tree.nodes[n].children.empty()) {
      n = tree.nodes[n].children[uct_select(tree, n, cfg.exploration)].node;
      path.push_back(n);
    }
    if (!is_terminal(tree.nodes[n], cfg) && !tree.nodes[n].untried.empty()) {
      n = expand(tree, n, target, cfg, rng);
      path.push_back(n);
    }
    double value = 0.0;
    for (std::size_t k = 1; k < path.size(); ++k) value += tree.nodes[path[k]].reward_here.r_all;
    const SearchNode& leaf = tree.nodes[n];
    value += simulate(leaf.mesh, leaf.reward_here, target, cfg, std::max(0, horizon - leaf.depth), rng);
    backpropagate(tree, path, value);
  }
}

std::optional<PlanStep> plan_one_step(const Mesh2D& mesh, const Image& target, const PlannerConfig& cfg,
                                      std::uint64_t tree_index) {
  cfg.validate();
  SearchTree tree(mesh, target, cfg);
  if (tree.root().total_actions == 0) return std::nullopt;
  grow_tree(tree, target, cfg, tree_index);
  const SearchNode& root = tree.root();
  if (root.children.empty()) return std::nullopt;
  const SearchChild* best = nullptr;
  double best_q = -std::numeric_limits<double>::infinity();
  PlanStep step;
  for (const SearchChild& child : root.children) {
    const double q = tree.nodes[child.node].q_value();
    step.root_q.push_back(q);
    if (q > best_q || (q == best_q && child.action_index < best->action_index)) {
      best_q = q;
      best = &child;
      step.chosen = step.root_q.size() - 1;
    }
  }
  step.topo = best->topo;
  step.action_index = best->action_index;
  step.geom = estimate_geometry(apply_topo(mesh, best->topo), target, cfg, true);
  return step;
}

Mesh2D replay(const ConstructionSequence& seq) {
  Mesh2D mesh = seq.initial;
  for (const SequenceStep& s : seq.steps) mesh = apply_geom(apply_topo(mesh, s.topo), s.geom);
  return mesh;
}

ConstructionSequence solve(const Mesh2D& initial, const Image& target, const PlannerConfig& cfg) {
  cfg.validate();
  ConstructionSequence seq{initial, {}, initial};
  Mesh2D current = initial;
  RewardBreakdown current_reward = compute_reward(current, target, cfg.weights);
  for (int k = 0; k < cfg.outer_steps; ++k) {
    if (current_reward.r_sm >= cfg.stop_iou) break;
    const auto step = plan_one_step(current, target, cfg, static_cast<std::uint64_t>(k));
    if (!step) break;
    Mesh2D next = apply_geom(apply_topo(current, step->topo), step->geom);
    const RewardBreakdown reward = compute_reward(next, target, cfg.weights);
    if (cfg.stop_on_no_gain && !(reward.r_all > current_reward.r_all)) break;
    seq.steps.push_back({step->topo, step->geom, reward});
    current = std::move(next);
    current_reward = reward;
  }
  seq.final_mesh = current;
  return seq;
}

}  // namespace polyseq
