#include "polyseq/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polyseq/raster.hpp"

namespace polyseq {

void OptimConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("optimizer iterations must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("optimizer step size must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("optimizer sigma must be positive");
  if (!(max_step > 0.0)) throw std::invalid_argument("optimizer max_step must be positive");
}

double objective(const Mesh2D& mesh, const Image& target, const OptimConfig& cfg) {
  return loss_mse(render_soft(mesh, target.resolution(), cfg.sigma), target);
}

Estimate estimate(const Mesh2D& mesh, const Image& target, const OptimConfig& cfg) {
  cfg.validate();
  const std::size_t n = mesh.num_vertices();
  GeomAction step;
  step.deltas.resize(n);
  Mesh2D current = mesh;
  Estimate out;
  LossGradient lg = loss_gradient(current, target, cfg.sigma);
  out.trace.losses.push_back(lg.loss);
  double eta = cfg.eta;
  for (int it = 0; it < cfg.iterations; ++it) {
    double gmax = 0.0;
    for (const Vec2& g : lg.gradient) gmax = std::max({gmax, std::abs(g.x), std::abs(g.y)});
    if (!(gmax > 0.0)) break;
    eta = std::min(eta, cfg.max_step / gmax);
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings && eta >= cfg.min_eta; ++h) {
      for (std::size_t i = 0; i < n; ++i) step.deltas[i] = lg.gradient[i] * -eta;
      Mesh2D trial = apply_geom(current, step);
      LossGradient trial_lg = loss_gradient(trial, target, cfg.sigma);
      if (trial_lg.loss < lg.loss) {
        current = std::move(trial);
        lg = std::move(trial_lg);
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
    out.trace.losses.push_back(lg.loss);
    ++out.trace.iterations;
    eta *= 2.0;
  }
  out.trace.final_loss = lg.loss;
  out.geom = displacement_between(mesh, current);
  return out;
}

Estimate estimate_fast(const Mesh2D& mesh, const Image& target, const OptimConfig& cfg, int iterations) {
  OptimConfig fast = cfg;
  fast.iterations = iterations;
  return estimate(mesh, target, fast);
}

}  // namespace polyseq
