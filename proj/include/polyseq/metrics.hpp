#pragma once

#include <cstddef>

#include "polyseq/image.hpp"
#include "polyseq/mesh.hpp"

namespace polyseq {

struct MetricsReport {
  double iou = 0.0;
  std::size_t complexity = 0;
  std::size_t self_intersections = 0;
  bool operator==(const MetricsReport&) const = default;
};

/// Intersection over union of two binary images (foreground = value >= 0.5).
/// Two empty images score 1. Throws std::invalid_argument on a resolution
/// mismatch.
double iou(const Image& a, const Image& b);

/// |V| + |E| + |F|.
std::size_t complexity(const Mesh2D& mesh);

/// Number of unordered edge pairs that cross at a point interior to both, or
/// overlap collinearly along a positive length. Pairs sharing a vertex and
/// pairs that only touch at an endpoint are not counted. Orientation tests run
/// in coordinates normalized to the mesh's bounding box with tolerance 1e-9.
std::size_t self_intersections(const Mesh2D& mesh);

MetricsReport measure(const Mesh2D& mesh, const Image& target_binary);

}  // namespace polyseq
