#include "polyseq/reward.hpp"

#include <cmath>
#include <stdexcept>

#include "polyseq/metrics.hpp"

namespace polyseq {

void RewardWeights::validate() const {
  for (double w : {w_sm, w_sc, w_si})
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("reward weights must be finite and non-negative");
}

RewardBreakdown combine(double r_sm, double r_sc, double r_si, const RewardWeights& w) {
  return {r_sm, r_sc, r_si, w.w_sm * r_sm - w.w_sc * r_sc - w.w_si * r_si};
}

RewardBreakdown compute_reward(const Mesh2D& mesh, const Image& target, const RewardWeights& weights) {
  weights.validate();
  const MetricsReport m = measure(mesh, target);
  return combine(m.iou, static_cast<double>(m.complexity), static_cast<double>(m.self_intersections), weights);
}

}  // namespace polyseq
