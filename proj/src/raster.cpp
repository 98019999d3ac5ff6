#include "polyseq/raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyseq {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

const double kBandFloor = logistic(-kBandSigmas);
const double kBandScale = 1.0 / (1.0 - 2.0 * kBandFloor);

struct Segment {
  std::size_t a;
  std::size_t b;
};

std::vector<Segment> outline(const Mesh2D& mesh) {
  std::vector<Segment> segs;
  for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    if (mesh.is_boundary_edge(e)) segs.push_back({mesh.edges()[e].a, mesh.edges()[e].b});
  return segs;
}

/// Closest outline segment per pixel, restricted to the soft band.
struct BandField {
  std::vector<char> inside;
  std::vector<double> dist2;   // squared distance; > band^2 when not in the band
  std::vector<int> segment;    // -1 outside the band
  std::vector<double> param;   // closest-point parameter along the segment
};

BandField band_field(const Mesh2D& mesh, Resolution res, double band, const std::vector<Segment>& segs) {
  BandField f;
  const std::size_t n = res.pixels();
  f.inside = inside_mask(mesh, res);
  const double band2 = band * band;
  f.dist2.assign(n, band2 * 4.0 + 1.0);
  f.segment.assign(n, -1);
  f.param.assign(n, 0.0);
  const auto& pts = mesh.vertices();
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const Vec2 a = pts[segs[s].a];
    const Vec2 b = pts[segs[s].b];
    const Vec2 ab = b - a;
    const double len2 = squared_norm(ab);
    const int x0 = std::max(0, static_cast<int>(std::ceil(std::min(a.x, b.x) - band - 0.5)));
    const int x1 = std::min(res.width - 1, static_cast<int>(std::floor(std::max(a.x, b.x) + band - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(std::min(a.y, b.y) - band - 0.5)));
    const int y1 = std::min(res.height - 1, static_cast<int>(std::floor(std::max(a.y, b.y) + band - 0.5)));
    for (int y = y0; y <= y1; ++y) {
      const double py = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const Vec2 ap{x + 0.5 - a.x, py - a.y};
        double t = len2 > 0.0 ? dot(ap, ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double d2 = squared_norm(ap - ab * t);
        const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(res.width) + static_cast<std::size_t>(x);
        if (d2 < f.dist2[i]) {
          f.dist2[i] = d2;
          f.segment[i] = static_cast<int>(s);
          f.param[i] = t;
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (f.dist2[i] >= band2) f.segment[i] = -1;
  return f;
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive and finite");
}

}  // namespace

double soft_coverage(double d, double sigma) {
  const double band = kBandSigmas * sigma;
  if (d >= band) return 1.0;
  if (d <= -band) return 0.0;
  return std::clamp((logistic(d / sigma) - kBandFloor) * kBandScale, 0.0, 1.0);
}

double soft_coverage_derivative(double d, double sigma) {
  if (std::abs(d) >= kBandSigmas * sigma) return 0.0;
  const double l = logistic(d / sigma);
  return l * (1.0 - l) / sigma * kBandScale;
}

std::vector<char> inside_mask(const Mesh2D& mesh, Resolution res) {
  std::vector<char> inside(res.pixels(), 0);
  const auto& pts = mesh.vertices();
  struct Crossing {
    double x;
    int dir;
  };
  std::vector<Crossing> xs;
  for (const FaceLoop& loop : mesh.faces()) {
    double ymin = pts[loop[0]].y, ymax = ymin;
    for (std::size_t v : loop) {
      ymin = std::min(ymin, pts[v].y);
      ymax = std::max(ymax, pts[v].y);
    }
    const int r0 = std::max(0, static_cast<int>(std::ceil(ymin - 0.5)));
    const int r1 = std::min(res.height - 1, static_cast<int>(std::floor(ymax - 0.5)));
    for (int row = r0; row <= r1; ++row) {
      const double yc = row + 0.5;
      xs.clear();
      for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec2 p = pts[loop[i]];
        const Vec2 q = pts[loop[(i + 1) % loop.size()]];
        if ((p.y <= yc) == (q.y <= yc)) continue;
        xs.push_back({p.x + (yc - p.y) * (q.x - p.x) / (q.y - p.y), q.y > p.y ? 1 : -1});
      }
      std::sort(xs.begin(), xs.end(), [](const Crossing& l, const Crossing& r) { return l.x < r.x; });
      int winding = 0;
      for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        winding += xs[k].dir;
        if (winding == 0) continue;
        // Pixel centers strictly right of xs[k] and not right of xs[k + 1].
        const int c0 = std::max(0, static_cast<int>(std::floor(xs[k].x - 0.5)) + 1);
        const int c1 = std::min(res.width - 1, static_cast<int>(std::floor(xs[k + 1].x - 0.5)));
        char* rowp = inside.data() + static_cast<std::size_t>(row) * static_cast<std::size_t>(res.width);
        for (int c = c0; c <= c1; ++c) rowp[c] = 1;
      }
    }
  }
  return inside;
}

Image render_soft(const Mesh2D& mesh, Resolution res, double sigma) {
  check_sigma(sigma);
  const auto segs = outline(mesh);
  const BandField f = band_field(mesh, res, kBandSigmas * sigma, segs);
  Image img(res);
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (f.segment[i] < 0) {
      img[i] = f.inside[i] ? 1.0 : 0.0;
    } else {
      const double dist = std::sqrt(f.dist2[i]);
      img[i] = soft_coverage(f.inside[i] ? dist : -dist, sigma);
    }
  }
  return img;
}

Image render_binary(const Mesh2D& mesh, Resolution res) {
  return binarize(render_soft(mesh, res, 1.0));
}

double loss_mse(const Image& img, const Image& target) {
  if (img.resolution() != target.resolution()) throw std::invalid_argument("loss_mse: resolution mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double r = img[i] - target[i];
    sum += r * r;
  }
  return sum / static_cast<double>(img.size());
}

LossGradient loss_gradient(const Mesh2D& mesh, const Image& target, double sigma) {
  check_sigma(sigma);
  const Resolution res = target.resolution();
  const auto segs = outline(mesh);
  const BandField f = band_field(mesh, res, kBandSigmas * sigma, segs);
  const auto& pts = mesh.vertices();
  const double inv_n = 1.0 / static_cast<double>(res.pixels());
  LossGradient out;
  out.gradient.assign(mesh.num_vertices(), Vec2{});
  double sum = 0.0;
  for (int y = 0; y < res.height; ++y) {
    for (int x = 0; x < res.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(res.width) + static_cast<std::size_t>(x);
      const int s = f.segment[i];
      if (s < 0) {
        const double r = (f.inside[i] ? 1.0 : 0.0) - target[i];
        sum += r * r;
        continue;
      }
      const double dist = std::sqrt(f.dist2[i]);
      const double sign = f.inside[i] ? 1.0 : -1.0;
      const double d = sign * dist;
      const double r = soft_coverage(d, sigma) - target[i];
      sum += r * r;
      const Segment seg = segs[static_cast<std::size_t>(s)];
      const Vec2 a = pts[seg.a];
      const Vec2 b = pts[seg.b];
      if (!(dist > 0.0) || !(squared_norm(b - a) > 0.0)) continue;
      const double t = f.param[i];
      const Vec2 p{x + 0.5, y + 0.5};
      const Vec2 u = (p - (a + (b - a) * t)) / dist;
      // d(dist)/da = -(1 - t) u, d(dist)/db = -t u with t held at its optimum.
      const double w = 2.0 * r * inv_n * soft_coverage_derivative(d, sigma) * sign;
      out.gradient[seg.a] -= u * (w * (1.0 - t));
      out.gradient[seg.b] -= u * (w * t);
    }
  }
  out.loss = sum * inv_n;
  return out;
}

}  // namespace polyseq
