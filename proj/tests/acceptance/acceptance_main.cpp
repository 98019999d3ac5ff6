// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fail. Pass a scratch directory as the only argument.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "polyseq/commands.hpp"
#include "polyseq/dataset.hpp"
#include "polyseq/inverse.hpp"
#include "polyseq/metrics.hpp"
#include "polyseq/raster.hpp"
#include "polyseq/tps.hpp"

using namespace polyseq;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<std::pair<int, Outcome>> g_results;

void report(int id, const std::string& name, Outcome o) {
  std::printf("[%s] criterion %d: %s | %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  g_results.emplace_back(id, std::move(o));
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "polyseq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SuiteRun {
  std::vector<cli::EvalRow> rows;
  cli::EvalRow mean;
  double max_seconds = 0.0;
  int failures = 0;
};

// Runs one CLI subcommand per dataset shape into `results`, then scores the
// directory with the evaluation harness.
SuiteRun run_suite(const fs::path& dataset, const fs::path& results, int count,
                   const std::function<std::vector<std::string>(const fs::path&, const fs::path&)>& args) {
  SuiteRun run;
  fs::create_directories(results);
  for (int i = 0; i < count; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "shape_%03d", i);
    const auto t0 = Clock::now();
    if (run_cli(args(dataset / (std::string(stem) + ".png"), results / (std::string(stem) + ".json"))) != 0)
      ++run.failures;
    run.max_seconds = std::max(run.max_seconds, seconds_since(t0));
  }
  run.rows = cli::evaluate(dataset, results);
  run.mean = cli::mean_row(run.rows);
  std::ofstream(results / "eval.csv") << cli::eval_csv(run.rows);
  return run;
}

std::string means(const cli::EvalRow& m) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "r_sm %.4f r_sc %.2f r_si %.2f r_all %.3f", m.r_sm, m.r_sc, m.r_si, m.r_all);
  return buf;
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  Rng rng(4004);
  int meshes = 0, components = 0, bad = 0;
  double worst = 0.0;
  while (meshes < 50) {
    const Mesh2D m = oracle::random_mesh(rng, 12, 3.0);
    const Image target = render_binary(oracle::random_mesh(rng, 12, 3.0), {64, 64});
    const LossGradient lg = loss_gradient(m, target, 1.0);
    for (std::size_t v = 0; v < m.num_vertices(); ++v)
      for (int axis = 0; axis < 2; ++axis) {
        auto at = [&](double s) {
          GeomAction g{std::vector<Vec2>(m.num_vertices())};
          (axis == 0 ? g.deltas[v].x : g.deltas[v].y) = s;
          return loss_mse(render_soft(apply_geom(m, g), {64, 64}, 1.0), target);
        };
        const double fd = (at(1e-3) - at(-1e-3)) / 2e-3;
        const double an = axis == 0 ? lg.gradient[v].x : lg.gradient[v].y;
        const double tol = std::max(1e-4, 1e-2 * std::fabs(fd));
        worst = std::max(worst, std::fabs(an - fd) / tol);
        bad += std::fabs(an - fd) > tol;
        ++components;
      }
    ++meshes;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 60.0, std::to_string(meshes) + " meshes, " + std::to_string(components) +
                                       " components, " + std::to_string(bad) + " outside tolerance, worst error/tol " +
                                       fmt("%.3f", worst) + ", " + fmt("%.1f s", secs)};
}

Outcome oracle_equivalences() {
  int bad = 0;
  // IoU on hand-counted squares: 10x10 squares offset by 5 px share 50 of 150 pixels.
  Image a({32, 32}), b({32, 32});
  for (int y = 5; y < 15; ++y)
    for (int x = 5; x < 15; ++x) {
      a.at(x, y) = 1.0;
      b.at(x + 5, y) = 1.0;
    }
  bad += iou(a, b) != 50.0 / 150.0;
  bad += iou(a, a) != 1.0;
  Image far({32, 32});
  far.at(30, 30) = 1.0;
  bad += iou(a, far) != 0.0;
  bad += iou(Image({32, 32}), Image({32, 32})) != 1.0;
  const int iou_bad = bad;

  Rng rng(5005);
  int si_bad = 0, si_nonzero = 0;
  for (int i = 0; i < 1000; ++i) {
    const Mesh2D m = oracle::random_mesh(rng, 24, 10.0);
    const std::size_t n = self_intersections(m);
    si_bad += n != oracle::crossing_pairs(m);
    si_nonzero += n > 0;
  }
  int raster_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const Mesh2D m = oracle::random_mesh(rng, 16, 4.0);
    raster_bad += !(render_binary(m, {64, 64}) == oracle::point_in_polygon_mask(m, {64, 64}));
  }
  return {iou_bad == 0 && si_bad == 0 && raster_bad == 0,
          "iou hand cases wrong " + std::to_string(iou_bad) + "/4; self_intersections mismatches " +
              std::to_string(si_bad) + "/1000 (" + std::to_string(si_nonzero) + " with crossings); render_binary " +
              "mismatches " + std::to_string(raster_bad) + "/100"};
}

Outcome inverse_recovery() {
  auto t0 = Clock::now();
  const Mesh2D rect = new_rect({28, 32}, 20, 20);
  const Estimate tr = estimate(rect, render_binary(new_rect({34, 32}, 20, 20), {64, 64}), OptimConfig{});
  const double t_secs = seconds_since(t0);
  Vec2 mean{};
  for (const Vec2& d : tr.geom.deltas) mean = mean + d * 0.25;
  const bool t_ok = std::fabs(mean.x - 6.0) <= 0.5 && std::fabs(mean.y) <= 0.5 && t_secs < 10.0;

  t0 = Clock::now();
  const Mesh2D base = new_rect({32, 32}, 20, 20);
  const Image scaled = render_binary(new_rect({32, 32}, 30, 30), {64, 64});
  const Estimate sc = estimate(base, scaled, OptimConfig{});
  const double s_secs = seconds_since(t0);
  const double s_iou = iou(render_binary(apply_geom(base, sc.geom), {64, 64}), scaled);
  const bool s_ok = s_iou >= 0.95 && s_secs < 10.0;
  return {t_ok && s_ok, "translation mean delta (" + fmt("%.3f", mean.x) + ", " + fmt("%.3f", mean.y) +
                            ") in " + fmt("%.2f s", t_secs) + "; 1.5x scale IoU " + fmt("%.4f", s_iou) + " in " +
                            fmt("%.2f s", s_secs)};
}

Outcome tps_suite() {
  Rng rng(7007);
  double interp_err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    TpsParams p = TpsParams::identity(8);
    for (Vec2& d : p.displacement) d = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
    for (std::size_t n = 0; n < 64; ++n) {
      const Vec2 c = control_point(8, n);
      interp_err = std::max(interp_err, norm(tps_transform(p, c) - (c + p.displacement[n])));
    }
  }
  const Image src = render_soft(new_rect({30.2, 33.1}, 20, 14), {64, 64}, 1.0);
  const bool identity_ok = warp_image(TpsParams::identity(8), src) == src;
  TpsParams shift = TpsParams::identity(8);
  shift.affine[2] = 1.0 / 64.0;
  Image expect({64, 64});
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x + 1 < 64; ++x) expect.at(x, y) = src.at(x + 1, y);
  const bool shift_ok = warp_image(shift, src) == expect;
  TpsParams affine = TpsParams::identity(8);
  affine.affine = {1, 0, 0.2, 0, 1, -0.1};
  const Vec2 moved = tps_transform(affine, {0.3, 0.7});
  const bool affine_ok = norm(moved - Vec2{0.5, 0.6}) < 1e-12;

  double worst_ratio = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Vec2 c{rng.uniform(24, 40), rng.uniform(24, 40)};
    const double w = rng.uniform(14, 26), h = rng.uniform(14, 26);
    const Vec2 t{rng.uniform(-4, 4), rng.uniform(-4, 4)};
    const Image a = render_binary(new_rect(c, w, h), {64, 64});
    const Image b = render_binary(new_rect(c + t, w, h), {64, 64});
    const TpsFit fit = fit_tps(a, b);
    worst_ratio = std::max(worst_ratio, warp_loss(fit.params, a, b) / warp_loss(TpsParams::identity(8), a, b));
  }
  return {interp_err < 1e-9 && identity_ok && shift_ok && affine_ok && worst_ratio <= 0.2,
          "interpolation error " + fmt("%.2e", interp_err) + "; identity warp " + (identity_ok ? "exact" : "WRONG") +
              "; 1 px warp " + (shift_ok ? "exact" : "WRONG") + "; affine-only " + (affine_ok ? "exact" : "WRONG") +
              "; worst fitted/identity loss on translated pairs " + fmt("%.3f", worst_ratio)};
}

Outcome one_step_soundness() {
  const Mesh2D start = default_initial_rect({64, 64});
  PlannerConfig cfg;
  int agree = 0;
  std::string misses;
  for (int k = 0; k < 20; ++k) {
    Rng rng(derive_seed({9009, static_cast<std::uint64_t>(k)}));
    const Mesh2D rect = new_rect({32 + rng.uniform(-3, 3), 32 + rng.uniform(-3, 3)}, rng.uniform(20, 28),
                                 rng.uniform(20, 28));
    const std::size_t edge = rng.below(4);
    const Mesh2D shape =
        apply_topo(rect, {TopoKind::EdgeExtrude, edge, 0.5, outward_normal(rect, edge) * rng.uniform(8, 12)});
    const Image target = render_binary(shape, {64, 64});

    // Exhaustive oracle: fully optimize every one-step child and rank by r_all.
    const auto actions = enumerate_valid_actions(start, cfg.extrude_length);
    std::vector<double> scores;
    for (const TopoAction& a : actions) {
      const Mesh2D edited = apply_topo(start, a);
      scores.push_back(compute_reward(apply_geom(edited, estimate(edited, target, cfg.optim).geom), target,
                                      cfg.weights).r_all);
    }
    const double best = *std::max_element(scores.begin(), scores.end());
    cfg.seed = static_cast<std::uint64_t>(k + 1);
    const auto step = plan_one_step(start, target, cfg);
    if (step && scores.at(step->action_index) == best)
      ++agree;
    else
      misses += " case" + std::to_string(k);
  }
  return {agree >= 18, std::to_string(agree) + "/20 agree with the exhaustive oracle" +
                           (misses.empty() ? "" : " (missed:" + misses + ")")};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "polyseq_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  const auto t_all = Clock::now();

  // Fresh 50-shape suite, seed 1, defaults.
  const fs::path dataset = work / "dataset";
  if (run_cli({"gen", "--seed", "1", "--out", dataset.string()}) != 0) {
    std::printf("[FAIL] dataset generation failed\n");
    return 1;
  }
  constexpr int kShapes = 50;

  const SuiteRun simple = run_suite(dataset, work / "dr_simple", kShapes, [](const fs::path& t, const fs::path& o) {
    return std::vector<std::string>{"baseline-dr", t.string(), "--variant", "simple", "--out", o.string()};
  });
  const SuiteRun complex = run_suite(dataset, work / "dr_complex", kShapes, [](const fs::path& t, const fs::path& o) {
    return std::vector<std::string>{"baseline-dr", t.string(), "--variant", "complex", "--out", o.string()};
  });
  {
    const bool sc_ok = std::all_of(simple.rows.begin(), simple.rows.end(), [](auto& r) { return r.r_sc == 9.0; }) &&
                       std::all_of(complex.rows.begin(), complex.rows.end(), [](auto& r) { return r.r_sc == 49.0; });
    const bool counts = simple.rows.size() == kShapes && complex.rows.size() == kShapes && !simple.failures &&
                        !complex.failures;
    const double slowest = std::max(simple.max_seconds, complex.max_seconds);
    report(1, "baseline exactness",
           {sc_ok && counts && slowest < 10.0, "simple r_sc all 9, complex r_sc all 49: " +
                                                   std::string(sc_ok ? "yes" : "NO") + "; rows " +
                                                   std::to_string(simple.rows.size()) + "/" +
                                                   std::to_string(complex.rows.size()) + "; slowest " +
                                                   fmt("%.2f s", slowest) + " per shape"});
  }

  const auto solve_args = [](std::vector<std::string> extra) {
    return [extra](const fs::path& t, const fs::path& o) {
      std::vector<std::string> a{"solve", t.string(), "--seed", "1", "--out", o.string()};
      a.insert(a.end(), extra.begin(), extra.end());
      return a;
    };
  };
  const SuiteRun full = run_suite(dataset, work / "solve", kShapes, solve_args({}));
  {
    const cli::EvalRow& m = full.mean;
    const bool ok = full.rows.size() == kShapes && !full.failures && m.r_sm >= 0.90 &&
                    m.r_sm > simple.mean.r_sm + 0.05 && m.r_sc < complex.mean.r_sc && m.r_si <= complex.mean.r_si &&
                    full.max_seconds <= 180.0;
    report(2, "suite ordering vs baselines",
           {ok, "search " + means(m) + "; DR simple " + means(simple.mean) + "; DR complex " + means(complex.mean) +
                    "; slowest " + fmt("%.1f s", full.max_seconds) + " per shape"});
  }

  const SuiteRun no_sc = run_suite(dataset, work / "solve_w_sc0", kShapes, solve_args({"--weights", "100,0,5"}));
  const SuiteRun no_si = run_suite(dataset, work / "solve_w_si0", kShapes, solve_args({"--weights", "100,1,0"}));
  report(3, "ablation directionality",
         {no_sc.mean.r_sc >= full.mean.r_sc && no_si.mean.r_si >= full.mean.r_si && !no_sc.failures && !no_si.failures,
          "w_sc=0 mean r_sc " + fmt("%.2f", no_sc.mean.r_sc) + " vs default " + fmt("%.2f", full.mean.r_sc) +
              "; w_si=0 mean r_si " + fmt("%.2f", no_si.mean.r_si) + " vs default " + fmt("%.2f", full.mean.r_si)});

  report(4, "gradient correctness", gradient_check());
  report(5, "oracle equivalences", oracle_equivalences());
  report(6, "inverse-estimation recovery", inverse_recovery());
  report(7, "tps suite", tps_suite());

  {
    // Byte-identical reruns on a sample of shapes, then exact replay of every
    // emitted sequence file.
    int identical = 0, reruns = 0;
    for (int i : {0, 17, 42}) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "shape_%03d", i);
      const fs::path again = work / "rerun" / (std::string(stem) + ".json");
      fs::create_directories(again.parent_path());
      run_cli({"solve", (dataset / (std::string(stem) + ".png")).string(), "--seed", "1", "--out", again.string()});
      ++reruns;
      identical += slurp(again) == slurp(work / "solve" / (std::string(stem) + ".json"));
    }
    int files = 0, replayed = 0;
    for (const char* dir : {"dataset", "solve", "solve_w_sc0", "solve_w_si0", "dr_simple", "dr_complex"})
      for (const auto& e : fs::directory_iterator(work / dir)) {
        if (e.path().extension() != ".json" || e.path().filename() == "manifest.json") continue;
        ++files;
        const ConstructionSequence seq = sequence_from_json(read_json(e.path()));
        Mesh2D m = seq.initial;
        for (const SequenceStep& s : seq.steps) m = apply_geom(apply_topo(m, s.topo), s.geom);
        replayed += m == seq.final_mesh;
      }
    report(8, "determinism and replay",
           {identical == reruns && replayed == files && files > 0,
            std::to_string(identical) + "/" + std::to_string(reruns) + " reruns byte-identical; " +
                std::to_string(replayed) + "/" + std::to_string(files) + " sequence files replay exactly"});
  }

  report(9, "one-step planning soundness", one_step_soundness());

  const auto failed = std::count_if(g_results.begin(), g_results.end(), [](auto& r) { return !r.second.pass; });
  std::printf("acceptance: %zu/%zu criteria passed in %.0f s\n", g_results.size() - static_cast<std::size_t>(failed),
              g_results.size(), seconds_since(t_all));
  return failed == 0 ? 0 : 1;
}
