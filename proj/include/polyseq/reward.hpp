#pragma once

#include "polyseq/image.hpp"
#include "polyseq/mesh.hpp"

namespace polyseq {

/// Reward weights. Defaults are the synthetic-shape profile; the complex-shape
/// profile lowers w_sc to 0.3.
struct RewardWeights {
  double w_sm = 100.0;
  double w_sc = 1.0;
  double w_si = 5.0;

  static RewardWeights synthetic() { return {}; }
  static RewardWeights complex_shapes() { return {100.0, 0.3, 5.0}; }

  /// Throws std::invalid_argument for negative or non-finite weights.
  void validate() const;
  bool operator==(const RewardWeights&) const = default;
};

struct RewardBreakdown {
  double r_sm = 0.0;  // IoU of the binarized render against the target
  double r_sc = 0.0;  // |V| + |E| + |F|
  double r_si = 0.0;  // self-intersection count
  double r_all = 0.0; // w_sm r_sm - w_sc r_sc - w_si r_si
  bool operator==(const RewardBreakdown&) const = default;
};

RewardBreakdown combine(double r_sm, double r_sc, double r_si, const RewardWeights& w);

/// Scores `mesh` against a binary target; the render uses the target's
/// resolution.
RewardBreakdown compute_reward(const Mesh2D& mesh, const Image& target, const RewardWeights& weights);

}  // namespace polyseq
