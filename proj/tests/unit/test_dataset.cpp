#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "polyseq/dataset.hpp"
#include "polyseq/metrics.hpp"
#include "polyseq/raster.hpp"

using namespace polyseq;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("polyseq_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("default initial shapes") {
  const Mesh2D rect = default_initial_rect({64, 64});
  CHECK(euler_counts(rect) == ElementCounts{4, 4, 1});
  CHECK(signed_area(rect, 0) == doctest::Approx(24.0 * 24.0));
  CHECK(euler_counts(default_initial_grid({64, 64})) == ElementCounts{16, 24, 9});
}

TEST_CASE("random_sequence with no steps renders the initial rectangle") {
  GenConfig cfg;
  cfg.steps = 0;
  const GeneratedShape s = random_sequence(cfg, 0);
  CHECK(s.truth.steps.empty());
  CHECK(s.target == render_binary(default_initial_rect({64, 64}), {64, 64}));
}

TEST_CASE("random_sequence targets are clean, replayable and deterministic") {
  GenConfig cfg;
  for (std::size_t i = 0; i < 30; ++i) {
    const GeneratedShape s = random_sequence(cfg, i);
    CHECK(self_intersections(s.truth.final_mesh) == 0);
    CHECK(all_faces_ccw(s.truth.final_mesh));
    CHECK(replay(s.truth) == s.truth.final_mesh);
    CHECK(s.target == render_binary(s.truth.final_mesh, cfg.resolution));
    CHECK(s.truth.steps.size() <= static_cast<std::size_t>(cfg.steps));
    for (const Vec2& v : s.truth.final_mesh.vertices()) {
      CHECK(v.x >= cfg.margin);
      CHECK(v.y >= cfg.margin);
      CHECK(v.x <= cfg.resolution.width - cfg.margin);
      CHECK(v.y <= cfg.resolution.height - cfg.margin);
    }
  }
  cfg.seed = 1;
  const GeneratedShape a = random_sequence(cfg, 3), b = random_sequence(cfg, 3);
  CHECK(a.target == b.target);
  CHECK(a.truth.steps == b.truth.steps);
  CHECK(a.truth.final_mesh == b.truth.final_mesh);
  CHECK(!(random_sequence(cfg, 4).truth.final_mesh == a.truth.final_mesh));
}

TEST_CASE("jitter bounds every generated displacement") {
  GenConfig cfg;
  cfg.jitter = 2.5;
  for (std::size_t i = 0; i < 10; ++i)
    for (const SequenceStep& s : random_sequence(cfg, i).truth.steps)
      for (const Vec2& d : s.geom.deltas) {
        CHECK(std::fabs(d.x) <= 2.5);
        CHECK(std::fabs(d.y) <= 2.5);
      }
}

TEST_CASE("gen_dataset writes targets, truths and a manifest") {
  GenConfig cfg;
  cfg.count = 50;
  const fs::path dir = scratch("gen");
  const Json manifest = gen_dataset(cfg, dir);
  int pngs = 0;
  for (const auto& e : fs::directory_iterator(dir)) pngs += e.path().extension() == ".png";
  CHECK(pngs == 50);
  REQUIRE(manifest.at("shapes").size() == 50);
  CHECK(read_json(dir / "manifest.json") == manifest);
  for (const Json& entry : manifest.at("shapes")) {
    const ConstructionSequence truth = sequence_from_json(read_json(dir / entry.at("truth").get<std::string>()));
    const ElementCounts c = euler_counts(truth.final_mesh);
    CHECK(entry.at("counts").at("vertices").get<std::size_t>() == c.vertices);
    CHECK(entry.at("counts").at("edges").get<std::size_t>() == c.edges);
    CHECK(entry.at("counts").at("faces").get<std::size_t>() == c.faces);
    CHECK(load_silhouette(dir / entry.at("target").get<std::string>()) == render_binary(truth.final_mesh, {64, 64}));
  }

  cfg.count = 5;
  const fs::path again1 = scratch("gen_a"), again2 = scratch("gen_b");
  gen_dataset(cfg, again1);
  gen_dataset(cfg, again2);
  for (const auto& e : fs::directory_iterator(again1))
    CHECK(slurp(e.path()) == slurp(again2 / e.path().filename()));
  fs::remove_all(dir);
  fs::remove_all(again1);
  fs::remove_all(again2);
}

TEST_CASE("gen_dataset reports unwritable directories") {
  const fs::path blocker = scratch("blocker");
  { std::ofstream(blocker) << "x"; }
  GenConfig cfg;
  cfg.count = 1;
  CHECK_THROWS_AS(gen_dataset(cfg, blocker / "sub"), std::runtime_error);
  fs::remove(blocker);
}

TEST_CASE("GenConfig validation") {
  GenConfig bad;
  bad.count = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = GenConfig{};
  bad.jitter = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = GenConfig{};
  bad.steps = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
