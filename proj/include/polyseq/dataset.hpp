#pragma once

#include <cstdint>
#include <filesystem>

#include "polyseq/image.hpp"
#include "polyseq/planner.hpp"
#include "polyseq/serialize.hpp"

namespace polyseq {

struct GenConfig {
  int steps = 6;              // random topological steps per shape
  double jitter = 4.0;        // max per-vertex translation per step, pixels
  std::uint64_t seed = 1;
  int count = 50;
  Resolution resolution{};
  double extrude_length = 8.0;
  int max_tries = 50;         // consecutive rejected samples before truncating
  double margin = 2.0;        // vertices must stay this far inside the frame

  void validate() const;
  bool operator==(const GenConfig&) const = default;
};

/// The shared starting shape: a rectangle centered in the frame, 3/8 of its
/// width and height.
Mesh2D default_initial_rect(Resolution res);
/// The 3 x 3 subdivided version of default_initial_rect.
Mesh2D default_initial_grid(Resolution res);

struct GeneratedShape {
  ConstructionSequence truth;
  Image target;  // binary render of the final mesh
};

/// Random construction from default_initial_rect: each step applies a
/// uniformly chosen valid edit and then independent uniform translations in
/// [-jitter, jitter]^2 to all vertices. Samples that self-intersect, flip a
/// face, or leave the frame are redrawn. Deterministic per (seed, index).
GeneratedShape random_sequence(const GenConfig& cfg, std::size_t index);

Json gen_config_to_json(const GenConfig& cfg);

/// Writes shape_%03d.png, shape_%03d.truth.json and manifest.json into
/// `out_dir` (created if missing) and returns the manifest. Throws
/// std::runtime_error when the directory cannot be written.
Json gen_dataset(const GenConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace polyseq
