#pragma once

#include <vector>

#include "polyseq/geometry.hpp"
#include "polyseq/image.hpp"
#include "polyseq/mesh.hpp"

namespace polyseq {

/// Half-width of the soft transition band, in units of sigma. Beyond it the
/// render is exactly 0 or 1 and pixels carry no gradient.
inline constexpr double kBandSigmas = 4.0;

/// Soft coverage of a pixel at signed distance `d` (positive inside): the
/// logistic of d / sigma, rescaled so that it reaches exactly 0 and 1 at the
/// band edges |d| = kBandSigmas * sigma. Equals 0.5 at d = 0.
double soft_coverage(double d, double sigma);
/// Derivative of soft_coverage with respect to d.
double soft_coverage_derivative(double d, double sigma);

/// Per-pixel nonzero-winding inside test over the union of all faces,
/// evaluated at pixel centers (x + 0.5, y + 0.5). Row-major, 1 = inside.
std::vector<char> inside_mask(const Mesh2D& mesh, Resolution res);

/// Soft silhouette: each pixel is soft_coverage of the signed distance from
/// its center to the silhouette outline (the mesh's boundary edges), signed
/// by the winding test.
Image render_soft(const Mesh2D& mesh, Resolution res, double sigma);

/// render_soft thresholded at 0.5. Independent of sigma.
Image render_binary(const Mesh2D& mesh, Resolution res);

/// Mean squared pixel difference. Throws std::invalid_argument on a
/// resolution mismatch.
double loss_mse(const Image& img, const Image& target);

struct LossGradient {
  double loss = 0.0;
  std::vector<Vec2> gradient;  // d loss / d vertex position, per vertex
};

/// Loss of render_soft(mesh) against `target` together with its analytic
/// gradient with respect to every vertex coordinate.
LossGradient loss_gradient(const Mesh2D& mesh, const Image& target, double sigma);

}  // namespace polyseq
