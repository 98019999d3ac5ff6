#include "polyseq/tps.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "polyseq/raster.hpp"

namespace polyseq {

namespace {

double kernel(double r2) {
  // r^2 log r written in terms of r^2; the r -> 0 limit is 0.
  return r2 > 0.0 ? 0.5 * r2 * std::log(r2) : 0.0;
}

/// Linear map from control displacements D to kernel weights plus the affine
/// part of the D interpolant: [w; a] = solution * D.
struct TpsBasis {
  int grid_size;
  std::vector<Vec2> controls;
  Eigen::MatrixXd solution;  // (n + 3) x n

  explicit TpsBasis(int m) : grid_size(m) {
    if (m < 2) throw std::invalid_argument("TPS grid size must be >= 2");
    const int n = m * m;
    for (int i = 0; i < n; ++i) controls.push_back(control_point(m, static_cast<std::size_t>(i)));
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 3, n + 3);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) system(i, j) = kernel(squared_norm(controls[i] - controls[j]));
      system(i, n) = 1.0;
      system(i, n + 1) = controls[i].x;
      system(i, n + 2) = controls[i].y;
      system(n, i) = 1.0;
      system(n + 1, i) = controls[i].x;
      system(n + 2, i) = controls[i].y;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible()) throw std::runtime_error("TPS interpolation system is singular");
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 3, n);
    rhs.topRows(n).setIdentity();
    solution = lu.solve(rhs);
  }

  int count() const { return grid_size * grid_size; }

  /// Row of weights such that T_D(p) = sum_j row[j] * D_j.
  Eigen::RowVectorXd row(Vec2 p) const {
    const int n = count();
    Eigen::RowVectorXd k(n + 3);
    for (int i = 0; i < n; ++i) k(i) = kernel(squared_norm(p - controls[static_cast<std::size_t>(i)]));
    k(n) = 1.0;
    k(n + 1) = p.x;
    k(n + 2) = p.y;
    return k * solution;
  }
};

std::shared_ptr<const TpsBasis> basis_for(int m) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const TpsBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[m];
  if (!slot) slot = std::make_shared<const TpsBasis>(m);
  return slot;
}

/// Basis rows for every pixel center of a resolution (P x n).
std::shared_ptr<const Eigen::MatrixXd> pixel_rows(int m, Resolution res) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const Eigen::MatrixXd>> cache;
  const auto key = std::make_tuple(m, res.width, res.height);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const auto basis = basis_for(m);
  auto rows = std::make_shared<Eigen::MatrixXd>(static_cast<Eigen::Index>(res.pixels()), basis->count());
  for (int y = 0; y < res.height; ++y)
    for (int x = 0; x < res.width; ++x)
      rows->row(static_cast<Eigen::Index>(y) * res.width + x) =
          basis->row(Vec2{(x + 0.5) / res.width, (y + 0.5) / res.height});
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::move(rows);
  return slot;
}

Eigen::MatrixXd displacement_matrix(const TpsParams& theta) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(theta.displacement.size()), 2);
  for (std::size_t i = 0; i < theta.displacement.size(); ++i) {
    d(static_cast<Eigen::Index>(i), 0) = theta.displacement[i].x;
    d(static_cast<Eigen::Index>(i), 1) = theta.displacement[i].y;
  }
  return d;
}

void check_params(const TpsParams& theta) {
  if (theta.grid_size < 2) throw std::invalid_argument("TPS grid size must be >= 2");
  if (theta.displacement.size() != static_cast<std::size_t>(theta.grid_size * theta.grid_size))
    throw std::invalid_argument("TPS displacement field must have M*M entries");
  for (double a : theta.affine)
    if (!std::isfinite(a)) throw std::invalid_argument("TPS affine part must be finite");
  for (const Vec2& d : theta.displacement)
    if (!is_finite(d)) throw std::invalid_argument("TPS displacements must be finite");
}

/// Sample positions T(q) for every pixel center, in normalized coordinates.
Eigen::MatrixXd sample_positions(const TpsParams& theta, Resolution res) {
  check_params(theta);
  const auto rows = pixel_rows(theta.grid_size, res);
  Eigen::MatrixXd pos = (*rows) * displacement_matrix(theta);
  const auto& a = theta.affine;
  for (int y = 0; y < res.height; ++y) {
    for (int x = 0; x < res.width; ++x) {
      const Eigen::Index i = static_cast<Eigen::Index>(y) * res.width + x;
      const double qx = (x + 0.5) / res.width;
      const double qy = (y + 0.5) / res.height;
      pos(i, 0) += a[0] * qx + a[1] * qy + a[2];
      pos(i, 1) += a[3] * qx + a[4] * qy + a[5];
    }
  }
  return pos;
}

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

struct Sample {
  double value;
  double dx;  // d value / d (pixel x)
  double dy;
};

Sample bilinear(const Image& src, double px, double py) {
  px = snap(px);
  py = snap(py);
  const double fx0 = std::floor(px);
  const double fy0 = std::floor(py);
  const double fx = px - fx0;
  const double fy = py - fy0;
  auto read = [&](double xd, double yd) {
    if (xd < 0.0 || yd < 0.0 || xd >= src.width() || yd >= src.height()) return 0.0;
    return src.at(static_cast<int>(xd), static_cast<int>(yd));
  };
  const double s00 = read(fx0, fy0);
  const double s10 = read(fx0 + 1.0, fy0);
  const double s01 = read(fx0, fy0 + 1.0);
  const double s11 = read(fx0 + 1.0, fy0 + 1.0);
  Sample s;
  s.value = (1 - fx) * (1 - fy) * s00 + fx * (1 - fy) * s10 + (1 - fx) * fy * s01 + fx * fy * s11;
  s.dx = (1 - fy) * (s10 - s00) + fy * (s11 - s01);
  s.dy = (1 - fx) * (s01 - s00) + fx * (s11 - s10);
  return s;
}

struct WarpEval {
  double energy;            // sum of squared residuals
  Eigen::MatrixXd grad_d;   // n x 2
  std::array<double, 6> grad_a{};
};

WarpEval evaluate(const TpsParams& theta, const Image& source, const Image& target, bool with_gradient) {
  const Resolution res = source.resolution();
  const Eigen::MatrixXd pos = sample_positions(theta, res);
  WarpEval out{0.0, {}, {}};
  Eigen::MatrixXd g;
  if (with_gradient) g = Eigen::MatrixXd::Zero(pos.rows(), 2);
  for (int y = 0; y < res.height; ++y) {
    for (int x = 0; x < res.width; ++x) {
      const Eigen::Index i = static_cast<Eigen::Index>(y) * res.width + x;
      const Sample s = bilinear(source, pos(i, 0) * res.width - 0.5, pos(i, 1) * res.height - 0.5);
      const double r = s.value - target.at(x, y);
      out.energy += r * r;
      if (!with_gradient) continue;
      const double gx = 2.0 * r * s.dx * res.width;
      const double gy = 2.0 * r * s.dy * res.height;
      g(i, 0) = gx;
      g(i, 1) = gy;
      const double qx = (x + 0.5) / res.width;
      const double qy = (y + 0.5) / res.height;
      out.grad_a[0] += gx * qx;
      out.grad_a[1] += gx * qy;
      out.grad_a[2] += gx;
      out.grad_a[3] += gy * qx;
      out.grad_a[4] += gy * qy;
      out.grad_a[5] += gy;
    }
  }
  if (with_gradient) out.grad_d = pixel_rows(theta.grid_size, res)->transpose() * g;
  return out;
}

}  // namespace

TpsParams TpsParams::identity(int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("TPS grid size must be >= 2");
  TpsParams p;
  p.grid_size = grid_size;
  p.displacement.assign(static_cast<std::size_t>(grid_size * grid_size), Vec2{});
  return p;
}

Vec2 control_point(int grid_size, std::size_t index) {
  const auto m = static_cast<std::size_t>(grid_size);
  return Vec2{static_cast<double>(index % m) / (grid_size - 1), static_cast<double>(index / m) / (grid_size - 1)};
}

Vec2 tps_transform(const TpsParams& theta, Vec2 p) {
  check_params(theta);
  if (!is_finite(p)) throw std::invalid_argument("tps_transform: non-finite point");
  const auto basis = basis_for(theta.grid_size);
  const Eigen::RowVectorXd w = basis->row(p);
  const auto& a = theta.affine;
  Vec2 out{a[0] * p.x + a[1] * p.y + a[2], a[3] * p.x + a[4] * p.y + a[5]};
  for (Eigen::Index j = 0; j < w.size(); ++j) out += theta.displacement[static_cast<std::size_t>(j)] * w(j);
  return out;
}

Image warp_image(const TpsParams& theta, const Image& source) {
  const Resolution res = source.resolution();
  const Eigen::MatrixXd pos = sample_positions(theta, res);
  Image out(res);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    out[i] = std::clamp(bilinear(source, pos(e, 0) * res.width - 0.5, pos(e, 1) * res.height - 0.5).value, 0.0, 1.0);
  }
  return out;
}

double warp_loss(const TpsParams& theta, const Image& source, const Image& target) {
  if (source.resolution() != target.resolution()) throw std::invalid_argument("warp_loss: resolution mismatch");
  return std::sqrt(evaluate(theta, source, target, false).energy);
}

TpsFit fit_tps(const Image& source, const Image& target, int grid_size, int iterations) {
  if (source.resolution() != target.resolution()) throw std::invalid_argument("fit_tps: resolution mismatch");
  TpsFit fit;
  fit.params = TpsParams::identity(grid_size);
  WarpEval cur = evaluate(fit.params, source, target, true);
  fit.losses.push_back(std::sqrt(cur.energy));
  const double max_step = 1.0 / std::max(source.width(), source.height());
  double eta = 1e-3;
  for (int it = 0; it < iterations; ++it) {
    double gmax = 0.0;
    for (double g : cur.grad_a) gmax = std::max(gmax, std::abs(g));
    gmax = std::max(gmax, cur.grad_d.cwiseAbs().maxCoeff());
    if (!(gmax > 0.0)) break;
    eta = std::min(eta, max_step / gmax);
    bool accepted = false;
    for (int h = 0; h <= 20; ++h) {
      TpsParams trial = fit.params;
      for (int k = 0; k < 6; ++k) trial.affine[static_cast<std::size_t>(k)] -= eta * cur.grad_a[static_cast<std::size_t>(k)];
      for (std::size_t j = 0; j < trial.displacement.size(); ++j) {
        const auto r = static_cast<Eigen::Index>(j);
        trial.displacement[j] -= Vec2{cur.grad_d(r, 0), cur.grad_d(r, 1)} * eta;
      }
      WarpEval next = evaluate(trial, source, target, true);
      if (next.energy < cur.energy) {
        fit.params = std::move(trial);
        cur = std::move(next);
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
    fit.losses.push_back(std::sqrt(cur.energy));
    eta *= 2.0;
  }
  return fit;
}

WarpGrid WarpGrid::regular(int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("warp grid size must be >= 2");
  WarpGrid g;
  g.grid_size = grid_size;
  for (std::size_t i = 0; i < static_cast<std::size_t>(grid_size * grid_size); ++i)
    g.nodes.push_back(control_point(grid_size, i));
  return g;
}

WarpGrid forward_warp(const TpsParams& theta, const WarpGrid& grid) {
  WarpGrid out = grid;
  for (Vec2& p : out.nodes) p = tps_transform(theta, p);
  return out;
}

WarpGrid inverse_warp(const TpsParams& theta, const WarpGrid& grid) {
  WarpGrid out = grid;
  constexpr double h = 1e-6;
  for (Vec2& node : out.nodes) {
    const Vec2 c = node;
    const Vec2 first_order = c - (tps_transform(theta, c) - c);
    Vec2 p = first_order;
    for (int it = 0; it < 20; ++it) {
      const Vec2 r = tps_transform(theta, p) - c;
      if (squared_norm(r) < 1e-26) break;
      const Vec2 jx = (tps_transform(theta, p + Vec2{h, 0}) - tps_transform(theta, p - Vec2{h, 0})) / (2 * h);
      const Vec2 jy = (tps_transform(theta, p + Vec2{0, h}) - tps_transform(theta, p - Vec2{0, h})) / (2 * h);
      const double det = jx.x * jy.y - jy.x * jx.y;
      if (!(std::abs(det) > 1e-12)) break;
      p -= Vec2{(jy.y * r.x - jy.x * r.y) / det, (-jx.y * r.x + jx.x * r.y) / det};
      if (!is_finite(p)) break;
    }
    node = is_finite(p) ? p : first_order;
  }
  return out;
}

Mesh2D warp_mesh(const Mesh2D& mesh, const WarpGrid& grid, const WarpGrid& warped, Resolution frame) {
  const int m = grid.grid_size;
  if (m < 2 || warped.grid_size != m || grid.nodes.size() != static_cast<std::size_t>(m * m) ||
      warped.nodes.size() != grid.nodes.size())
    throw std::invalid_argument("warp_mesh: grids must share size and layout");
  const Vec2 lo = grid.nodes.front();
  const Vec2 hi = grid.nodes.back();
  std::vector<Vec2> pts = mesh.vertices();
  for (Vec2& v : pts) {
    Vec2 u{v.x / frame.width, v.y / frame.height};
    u.x = std::clamp(u.x, lo.x, hi.x);
    u.y = std::clamp(u.y, lo.y, hi.y);
    const double sx = (u.x - lo.x) / (hi.x - lo.x) * (m - 1);
    const double sy = (u.y - lo.y) / (hi.y - lo.y) * (m - 1);
    const int i = std::clamp(static_cast<int>(std::floor(sx)), 0, m - 2);
    const int j = std::clamp(static_cast<int>(std::floor(sy)), 0, m - 2);
    const auto node = [m](int x, int y) { return static_cast<std::size_t>(y * m + x); };
    std::array<std::size_t, 3> tri;
    if (sx - i >= sy - j)
      tri = {node(i, j), node(i + 1, j), node(i + 1, j + 1)};
    else
      tri = {node(i, j), node(i + 1, j + 1), node(i, j + 1)};
    const Vec2 a = grid.nodes[tri[0]], b = grid.nodes[tri[1]], c = grid.nodes[tri[2]];
    const double det = cross(b - a, c - a);
    const double beta = cross(u - a, c - a) / det;
    const double gamma = cross(b - a, u - a) / det;
    const double alpha = 1.0 - beta - gamma;
    // Interpolate node displacements and add them in pixel space so an
    // unchanged grid leaves vertices bit-identical. Vertices outside the hull
    // take the displacement of their clamped position.
    const Vec2 d = (warped.nodes[tri[0]] - a) * alpha + (warped.nodes[tri[1]] - b) * beta +
                   (warped.nodes[tri[2]] - c) * gamma;
    v = v + Vec2{d.x * frame.width, d.y * frame.height};
  }
  return Mesh2D(std::move(pts), mesh.faces(), mesh.vertex_ids(), mesh.next_vertex_id());
}

GeomAction fast_estimate(const Mesh2D& mesh, const Image& target, const TpsConfig& tps, double sigma) {
  const Image source = render_soft(mesh, target.resolution(), sigma);
  const TpsFit fit = fit_tps(source, target, tps.grid_size, tps.iterations);
  const WarpGrid grid = WarpGrid::regular(tps.grid_size);
  const WarpGrid moved = inverse_warp(fit.params, grid);
  return displacement_between(mesh, warp_mesh(mesh, grid, moved, target.resolution()));
}

}  // namespace polyseq
