#pragma once

#include <array>
#include <vector>

#include "polyseq/geometry.hpp"
#include "polyseq/image.hpp"
#include "polyseq/inverse.hpp"
#include "polyseq/mesh.hpp"

namespace polyseq {

/// Thin-plate-spline warp parameters in normalized [0,1]^2 image coordinates:
/// an affine map plus displacements of the M x M regular control grid.
struct TpsParams {
  int grid_size = 8;                        // M
  std::array<double, 6> affine{1, 0, 0, 0, 1, 0};  // row-major [a00 a01 a02; a10 a11 a12]
  std::vector<Vec2> displacement;           // row-major M x M, control node (i, j) at index j*M + i

  static TpsParams identity(int grid_size);
  bool operator==(const TpsParams&) const = default;
};

/// Node i of the regular M x M control grid in normalized coordinates.
Vec2 control_point(int grid_size, std::size_t index);

/// T(p) = A [p; 1] + sum_i w_i phi(|p - c_i|) + (affine part of the D
/// interpolant), phi(r) = r^2 log r. The kernel weights come from the standard
/// TPS interpolation system solved for D, so with identity A every control
/// point c_i lands exactly on c_i + D_i.
Vec2 tps_transform(const TpsParams& theta, Vec2 p);

/// Inverse-mapping warp: output(q) = bilinear(source, T(q)) at every pixel
/// center q, with zero outside the source.
Image warp_image(const TpsParams& theta, const Image& source);

/// L2 norm of warp_image(theta, source) - target.
double warp_loss(const TpsParams& theta, const Image& source, const Image& target);

struct TpsFit {
  TpsParams params;
  std::vector<double> losses;  // accepted iterates, starting at identity
};

/// Gradient descent with backtracking on warp_loss over (A, D), starting from
/// identity. Returns the best parameters seen. Deterministic.
TpsFit fit_tps(const Image& source, const Image& target, int grid_size = 8, int iterations = 100);

/// M x M lattice in normalized coordinates, row-major. Each cell is split into
/// two triangles along its low-low / high-high diagonal.
struct WarpGrid {
  int grid_size = 8;
  std::vector<Vec2> nodes;

  static WarpGrid regular(int grid_size);
};

/// T applied to every node of `grid`.
WarpGrid forward_warp(const TpsParams& theta, const WarpGrid& grid);
/// Nodes moved to T^-1 of their position (Newton iterations on T).
WarpGrid inverse_warp(const TpsParams& theta, const WarpGrid& grid);

/// Re-embeds each vertex: locate its triangle in `grid` (vertices outside the
/// grid are clamped onto it first), take barycentric coordinates, and evaluate
/// them in the matching triangle of `warped`. `frame` maps image units to the
/// normalized grid coordinates. Topology is unchanged.
Mesh2D warp_mesh(const Mesh2D& mesh, const WarpGrid& grid, const WarpGrid& warped, Resolution frame);

struct TpsConfig {
  int grid_size = 8;
  int iterations = 100;
  bool operator==(const TpsConfig&) const = default;
};

/// Surrogate geometric step: render the mesh, fit a TPS warp of the render onto
/// the target, and move the vertices with the warped control grid. Because the
/// render is sampled at T(q), its content moves by T^-1, so the grid is warped
/// by the inverse transform.
GeomAction fast_estimate(const Mesh2D& mesh, const Image& target, const TpsConfig& tps, double sigma);

}  // namespace polyseq
