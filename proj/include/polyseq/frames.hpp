#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyseq/image.hpp"
#include "polyseq/planner.hpp"

namespace polyseq {

enum class FrameFormat { Svg, Png };

class ReplayMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial mesh followed by the state after every step. Throws ReplayMismatch
/// when the last state differs from the recorded final mesh or a step cannot
/// be applied.
std::vector<Mesh2D> replay_states(const ConstructionSequence& seq);

/// One <polygon> per face (filled silhouette) and one <polyline> per edge.
std::string frame_svg(const Mesh2D& mesh, Resolution res);

/// Byte levels: 255 silhouette, 0 background, wireframe pixels 192 inside the
/// silhouette and 64 outside, so a 128 threshold gives back render_binary.
Image frame_raster(const Mesh2D& mesh, Resolution res);

/// Writes frame_%03d.{svg,png} for every replayed state and returns the paths.
std::vector<std::filesystem::path> write_frames(const ConstructionSequence& seq, Resolution res,
                                                const std::filesystem::path& out_dir, FrameFormat format);

}  // namespace polyseq
