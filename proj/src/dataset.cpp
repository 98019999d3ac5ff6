#include "polyseq/dataset.hpp"

#include <cstdio>
#include <stdexcept>

#include "polyseq/metrics.hpp"
#include "polyseq/raster.hpp"
#include "polyseq/rng.hpp"

namespace polyseq {

void GenConfig::validate() const {
  if (steps < 0) throw std::invalid_argument("gen steps must be >= 0");
  if (count < 1) throw std::invalid_argument("gen count must be >= 1");
  if (!(jitter >= 0.0) || !std::isfinite(jitter)) throw std::invalid_argument("gen jitter must be >= 0");
  if (resolution.width <= 0 || resolution.height <= 0) throw std::invalid_argument("resolution must be positive");
  if (!(extrude_length > 0.0)) throw std::invalid_argument("extrude_length must be positive");
  if (max_tries < 1) throw std::invalid_argument("max_tries must be >= 1");
}

Mesh2D default_initial_rect(Resolution res) {
  return new_rect({res.width * 0.5, res.height * 0.5}, res.width * 0.375, res.height * 0.375);
}

Mesh2D default_initial_grid(Resolution res) {
  return new_subdivided_rect({res.width * 0.5, res.height * 0.5}, res.width * 0.375, res.height * 0.375, 2);
}

namespace {

bool inside_frame(const Mesh2D& mesh, Resolution res, double margin) {
  for (const Vec2& v : mesh.vertices())
    if (v.x < margin || v.y < margin || v.x > res.width - margin || v.y > res.height - margin) return false;
  return true;
}

bool clean(const Mesh2D& mesh, const GenConfig& cfg) {
  return all_faces_ccw(mesh) && inside_frame(mesh, cfg.resolution, cfg.margin) && self_intersections(mesh) == 0;
}

}  // namespace

GeneratedShape random_sequence(const GenConfig& cfg, std::size_t index) {
  cfg.validate();
  Rng rng(derive_seed({cfg.seed, static_cast<std::uint64_t>(index)}));
  const Mesh2D initial = default_initial_rect(cfg.resolution);
  Mesh2D current = initial;
  std::vector<std::pair<TopoAction, GeomAction>> steps;
  for (int s = 0; s < cfg.steps; ++s) {
    bool accepted = false;
    for (int attempt = 0; attempt < cfg.max_tries && !accepted; ++attempt) {
      const auto actions = enumerate_valid_actions(current, cfg.extrude_length);
      const TopoAction action = actions[static_cast<std::size_t>(rng.below(actions.size()))];
      const Mesh2D edited = apply_topo(current, action);
      GeomAction geom;
      geom.deltas.resize(edited.num_vertices());
      for (Vec2& d : geom.deltas) {
        d.x = rng.uniform(-cfg.jitter, cfg.jitter);
        d.y = rng.uniform(-cfg.jitter, cfg.jitter);
      }
      Mesh2D moved = apply_geom(edited, geom);
      if (!clean(moved, cfg)) continue;
      steps.emplace_back(action, std::move(geom));
      current = std::move(moved);
      accepted = true;
    }
    if (!accepted) break;
  }
  GeneratedShape out{{initial, {}, current}, render_binary(current, cfg.resolution)};
  // Per-step rewards are scored against the final target.
  Mesh2D replayed = initial;
  for (auto& [topo, geom] : steps) {
    replayed = apply_geom(apply_topo(replayed, topo), geom);
    out.truth.steps.push_back({topo, std::move(geom), compute_reward(replayed, out.target, RewardWeights{})});
  }
  return out;
}

Json gen_config_to_json(const GenConfig& cfg) {
  return Json{{"steps", cfg.steps},
              {"jitter", cfg.jitter},
              {"seed", cfg.seed},
              {"count", cfg.count},
              {"resolution", Json::array({cfg.resolution.width, cfg.resolution.height})},
              {"extrude_length", cfg.extrude_length},
              {"max_tries", cfg.max_tries},
              {"margin", cfg.margin}};
}

Json gen_dataset(const GenConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory " + out_dir.string());
  Json shapes = Json::array();
  for (int i = 0; i < cfg.count; ++i) {
    const auto index = static_cast<std::size_t>(i);
    const GeneratedShape shape = random_sequence(cfg, index);
    char stem[32];
    std::snprintf(stem, sizeof stem, "shape_%03d", i);
    const std::string png = std::string(stem) + ".png";
    const std::string truth = std::string(stem) + ".truth.json";
    save_png(shape.target, out_dir / png);
    write_json(sequence_to_json(shape.truth, gen_config_to_json(cfg), cfg.seed), out_dir / truth);
    const ElementCounts counts = euler_counts(shape.truth.final_mesh);
    shapes.push_back(Json{{"index", i},
                          {"target", png},
                          {"truth", truth},
                          {"seed", derive_seed({cfg.seed, static_cast<std::uint64_t>(i)})},
                          {"steps", shape.truth.steps.size()},
                          {"counts", Json{{"vertices", counts.vertices}, {"edges", counts.edges}, {"faces", counts.faces}}}});
  }
  Json manifest{{"config", gen_config_to_json(cfg)}, {"shapes", std::move(shapes)}};
  write_json(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace polyseq
