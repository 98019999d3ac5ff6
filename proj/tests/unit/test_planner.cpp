#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "polyseq/dataset.hpp"
#include "polyseq/planner.hpp"
#include "polyseq/raster.hpp"

using namespace polyseq;

namespace {

PlannerConfig small_config() {
  PlannerConfig cfg;
  cfg.mcts_iterations = 20;
  cfg.rollout_depth = 2;
  cfg.outer_steps = 3;
  cfg.optim.iterations = 60;
  cfg.fast_iterations = 10;
  return cfg;
}

// A tree whose root has fully-expanded children with the given statistics.
SearchTree tree_with_children(const std::vector<std::pair<double, std::size_t>>& q_and_visits) {
  const Mesh2D rect = new_rect({32, 32}, 20, 20);
  const Image target = render_binary(rect, {64, 64});
  SearchTree tree(rect, target, PlannerConfig{});
  SearchNode& root = tree.root();
  root.untried.clear();
  root.untried_index.clear();
  std::size_t total = 0;
  for (std::size_t i = 0; i < q_and_visits.size(); ++i) {
    SearchNode child = tree.nodes.front();
    child.children.clear();
    child.depth = 1;
    child.visits = q_and_visits[i].second;
    child.value_sum = q_and_visits[i].first * static_cast<double>(child.visits);
    total += child.visits;
    tree.nodes.push_back(child);
    tree.nodes.front().children.push_back({TopoAction{}, GeomAction{}, tree.nodes.size() - 1, i});
  }
  tree.nodes.front().visits = total;
  return tree;
}

}  // namespace

TEST_CASE("uct_select examples") {
  CHECK(uct_select(tree_with_children({{3, 1}, {7, 1}, {5, 1}}), 0, 0.0) == 1);
  CHECK(uct_select(tree_with_children({{4, 2}, {4, 2}}), 0, std::sqrt(2.0)) == 0);
  CHECK(uct_select(tree_with_children({{1, 100}, {1, 1}}), 0, 1e6) == 1);

  const Mesh2D rect = new_rect({32, 32}, 20, 20);
  SearchTree fresh(rect, render_binary(rect, {64, 64}), PlannerConfig{});
  CHECK_THROWS_AS(uct_select(fresh, 0, 1.0), std::logic_error);
}

TEST_CASE("backpropagate keeps running means") {
  SearchTree tree = tree_with_children({{0, 0}});
  tree.nodes[0].visits = 0;
  const std::vector<std::size_t> one{1};
  backpropagate(tree, one, 10.0);
  CHECK(tree.nodes[1].q_value() == 10.0);
  CHECK(tree.nodes[1].visits == 1);
  backpropagate(tree, one, 0.0);
  CHECK(tree.nodes[1].q_value() == 5.0);
  CHECK(tree.nodes[1].visits == 2);

  SearchTree chain = tree_with_children({{0, 0}, {0, 0}});
  chain.nodes[0].visits = 0;
  const std::vector<std::size_t> path{0, 1, 2};
  backpropagate(chain, path, 3.0);
  for (std::size_t n : path) CHECK(chain.nodes[n].visits == 1);
}

TEST_CASE("expand bookkeeping") {
  const Mesh2D rect = new_rect({30, 32}, 20, 20);
  const Image target = render_binary(new_rect({32, 32}, 24, 20), {64, 64});
  const PlannerConfig cfg = small_config();
  SearchTree tree(rect, target, cfg);
  CHECK(tree.root().total_actions == 9);
  CHECK(tree.root().untried.size() == 9);
  Rng rng(1);
  const std::size_t child = expand(tree, 0, target, cfg, rng);
  CHECK(tree.root().untried.size() == 8);
  CHECK(tree.root().children.size() == 1);
  const TopoAction& a = tree.root().children[0].topo;
  CHECK(euler_counts(tree.nodes[child].mesh) == euler_counts(apply_topo(rect, a)));
  CHECK(tree.nodes[child].depth == 1);
  CHECK(tree.nodes[child].reward_here == compute_reward(tree.nodes[child].mesh, target, cfg.weights));
  CHECK(std::find(tree.root().untried.begin(), tree.root().untried.end(), a) == tree.root().untried.end());

  // With one untried action left, that action is chosen.
  SearchTree single(rect, target, cfg);
  single.root().untried.resize(1);
  single.root().untried_index.resize(1);
  const TopoAction only = single.root().untried[0];
  expand(single, 0, target, cfg, rng);
  CHECK(single.root().children[0].topo == only);
  CHECK_THROWS_AS(expand(single, 0, target, cfg, rng), std::logic_error);
}

TEST_CASE("simulate") {
  const Mesh2D rect = new_rect({30, 32}, 20, 20);
  const Image target = render_binary(new_rect({32, 32}, 24, 20), {64, 64});
  const PlannerConfig cfg = small_config();
  const RewardBreakdown here = compute_reward(rect, target, cfg.weights);
  Rng zero(5);
  CHECK(simulate(rect, here, target, cfg, 0, zero) == 0.0);

  // One step by hand: the same draw, edit, fast estimate and reward.
  Rng a(42), b(42);
  const double got = simulate(rect, here, target, cfg, 1, a);
  const auto actions = enumerate_valid_actions(rect, cfg.extrude_length);
  const TopoAction act = actions[b.below(actions.size())];
  const Mesh2D edited = apply_topo(rect, act);
  const Mesh2D moved = apply_geom(edited, estimate_fast(edited, target, cfg.optim, cfg.fast_iterations).geom);
  CHECK(got == compute_reward(moved, target, cfg.weights).r_all);

  Rng c(9), d(9);
  CHECK(simulate(rect, here, target, cfg, 3, c) == simulate(rect, here, target, cfg, 3, d));

  // A matched state is absorbing: its reward repeats for the remaining steps.
  const Image exact = render_binary(rect, {64, 64});
  const RewardBreakdown matched = compute_reward(rect, exact, cfg.weights);
  Rng e(3);
  CHECK(simulate(rect, matched, exact, cfg, 3, e) == 3.0 * matched.r_all);
}

TEST_CASE("grow_tree keeps tree invariants") {
  const Mesh2D rect = new_rect({30, 32}, 20, 20);
  const Image target = render_binary(new_rect({32, 30}, 26, 18), {64, 64});
  const PlannerConfig cfg = small_config();
  SearchTree tree(rect, target, cfg);
  grow_tree(tree, target, cfg, 0);
  CHECK(tree.root().visits == static_cast<std::size_t>(cfg.mcts_iterations));
  for (const SearchNode& n : tree.nodes) {
    CHECK(n.children.size() + n.untried.size() == n.total_actions);
    std::size_t child_visits = 0;
    for (const SearchChild& c : n.children) child_visits += tree.nodes[c.node].visits;
    CHECK(n.visits >= child_visits);
    CHECK(n.visits >= n.children.size());
    CHECK(n.depth <= search_horizon(cfg));
  }
}

TEST_CASE("plan_one_step picks the best root child and is deterministic") {
  const Mesh2D rect = new_rect({30, 32}, 20, 20);
  const Image target = render_binary(new_rect({32, 30}, 26, 18), {64, 64});
  const PlannerConfig cfg = small_config();
  const auto a = plan_one_step(rect, target, cfg);
  const auto b = plan_one_step(rect, target, cfg);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->topo == b->topo);
  CHECK(a->geom == b->geom);
  CHECK(a->root_q == b->root_q);
  for (double q : a->root_q) CHECK(a->root_q.at(a->chosen) >= q);
  const auto actions = enumerate_valid_actions(rect, cfg.extrude_length);
  CHECK(actions.at(a->action_index) == a->topo);
  // The returned geometry is the full estimate on the edited mesh.
  const Mesh2D edited = apply_topo(rect, a->topo);
  CHECK(a->geom == estimate(edited, target, cfg.optim).geom);
}

TEST_CASE("solve stops immediately on a matched target") {
  const Mesh2D rect = new_rect({32, 32}, 20, 20);
  const ConstructionSequence seq = solve(rect, render_binary(rect, {64, 64}), small_config());
  CHECK(seq.steps.empty());
  CHECK(seq.final_mesh == rect);
}

TEST_CASE("solve output replays exactly and is deterministic") {
  GenConfig gen;
  gen.steps = 2;
  const GeneratedShape shape = random_sequence(gen, 0);
  const Mesh2D start = default_initial_rect({64, 64});
  const PlannerConfig cfg = small_config();
  const ConstructionSequence a = solve(start, shape.target, cfg);
  const ConstructionSequence b = solve(start, shape.target, cfg);
  CHECK(a.steps == b.steps);
  CHECK(a.final_mesh == b.final_mesh);
  CHECK(replay(a) == a.final_mesh);
  Mesh2D m = a.initial;
  for (const SequenceStep& s : a.steps) {
    m = apply_geom(apply_topo(m, s.topo), s.geom);
    CHECK(s.reward == compute_reward(m, shape.target, cfg.weights));
  }
  CHECK(m == a.final_mesh);
}

TEST_CASE("PlannerConfig validation") {
  CHECK_NOTHROW(PlannerConfig{}.validate());
  PlannerConfig bad;
  bad.mcts_iterations = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = PlannerConfig{};
  bad.exploration = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = PlannerConfig{};
  bad.stop_iou = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = PlannerConfig{};
  bad.stop_iou = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("derived RNG streams are stable") {
  CHECK(derive_seed({1, 2, 3}) == derive_seed({1, 2, 3}));
  CHECK(derive_seed({1, 2, 3}) != derive_seed({1, 3, 2}));
  Rng r(derive_seed({1, 0, 0}));
  Rng s(derive_seed({1, 0, 0}));
  for (int i = 0; i < 100; ++i) {
    const auto k = r.below(7);
    CHECK(k < 7);
    CHECK(k == s.below(7));
    const double u = r.unit();
    CHECK(u == s.unit());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
