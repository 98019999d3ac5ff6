#pragma once

#include <vector>

#include "polyseq/image.hpp"
#include "polyseq/mesh.hpp"

namespace polyseq {

/// Gradient-descent settings for fitting vertex positions to a silhouette.
struct OptimConfig {
  int iterations = 200;
  double eta = 50.0;        // initial step size, pixel units
  double min_eta = 1e-3;    // stop once backtracking drives the step below this
  int max_halvings = 20;    // per iteration
  double max_step = 1.0;    // largest vertex displacement per iteration, pixels
  double sigma = 1.0;       // raster softness

  /// Throws std::invalid_argument when iterations < 1 or eta <= 0.
  void validate() const;
  bool operator==(const OptimConfig&) const = default;
};

/// Iteration budget of the cheap estimator used inside search rollouts.
inline constexpr int kFastIterations = 30;

struct OptimTrace {
  std::vector<double> losses;  // accepted iterates, starting with the initial loss
  double final_loss = 0.0;
  int iterations = 0;          // accepted steps
};

struct Estimate {
  GeomAction geom;
  OptimTrace trace;
};

/// Soft-render loss of `mesh` against `target` at the target's resolution.
double objective(const Mesh2D& mesh, const Image& target, const OptimConfig& cfg);

/// Minimizes objective() over vertex positions with fixed topology using
/// x <- x - eta * dPsi/dx. Steps that do not lower the loss are retried with
/// eta halved; after an accepted step eta doubles, capped so that no vertex
/// moves more than max_step. Returns the displacement from the input
/// positions. Deterministic.
Estimate estimate(const Mesh2D& mesh, const Image& target, const OptimConfig& cfg);

/// estimate() with the iteration budget replaced by `iterations`.
Estimate estimate_fast(const Mesh2D& mesh, const Image& target, const OptimConfig& cfg,
                       int iterations = kFastIterations);

}  // namespace polyseq
