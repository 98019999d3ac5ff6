#include "polyseq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polyseq/raster.hpp"

namespace polyseq {

double iou(const Image& a, const Image& b) {
  if (a.resolution() != b.resolution()) throw std::invalid_argument("iou: resolution mismatch");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool fa = a[i] >= 0.5;
    const bool fb = b[i] >= 0.5;
    inter += (fa && fb) ? 1 : 0;
    uni += (fa || fb) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t complexity(const Mesh2D& mesh) {
  return mesh.num_vertices() + mesh.num_edges() + mesh.num_faces();
}

namespace {

constexpr double kEps = 1e-9;

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double o = cross(b - a, c - a);
  if (o > kEps) return 1;
  if (o < -kEps) return -1;
  return 0;
}

bool segments_conflict(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return o1 != o2 && o3 != o4;
  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // Collinear: measure the overlap along the dominant axis.
    const Vec2 dir = b - a;
    const bool use_x = std::abs(dir.x) >= std::abs(dir.y);
    auto coord = [use_x](Vec2 p) { return use_x ? p.x : p.y; };
    const double lo = std::max(std::min(coord(a), coord(b)), std::min(coord(c), coord(d)));
    const double hi = std::min(std::max(coord(a), coord(b)), std::max(coord(c), coord(d)));
    return hi - lo > kEps;
  }
  return false;
}

}  // namespace

std::size_t self_intersections(const Mesh2D& mesh) {
  const auto& raw = mesh.vertices();
  double xmin = raw[0].x, xmax = xmin, ymin = raw[0].y, ymax = ymin;
  for (const Vec2& p : raw) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double extent = std::max({xmax - xmin, ymax - ymin, 1e-300});
  std::vector<Vec2> pts(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) pts[i] = Vec2{(raw[i].x - xmin) / extent, (raw[i].y - ymin) / extent};

  const auto& edges = mesh.edges();
  std::size_t count = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const Edge e = edges[i];
      const Edge f = edges[j];
      if (e.a == f.a || e.a == f.b || e.b == f.a || e.b == f.b) continue;
      if (segments_conflict(pts[e.a], pts[e.b], pts[f.a], pts[f.b])) ++count;
    }
  }
  return count;
}

MetricsReport measure(const Mesh2D& mesh, const Image& target_binary) {
  return {iou(render_binary(mesh, target_binary.resolution()), target_binary), complexity(mesh),
          self_intersections(mesh)};
}

}  // namespace polyseq
