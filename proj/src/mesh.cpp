#include "polyseq/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace polyseq {

namespace {

std::uint64_t edge_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

std::vector<std::uint64_t> sequential_ids(std::size_t n) {
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

double loop_area(const std::vector<Vec2>& pts, const FaceLoop& loop) {
  double twice = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2& p = pts[loop[i]];
    const Vec2& q = pts[loop[(i + 1) % loop.size()]];
    twice += cross(p, q);
  }
  return 0.5 * twice;
}

Vec2 loop_centroid(const std::vector<Vec2>& pts, const FaceLoop& loop) {
  Vec2 c{};
  for (std::size_t v : loop) c += pts[v];
  return c / static_cast<double>(loop.size());
}

}  // namespace

Mesh2D::Mesh2D(std::vector<Vec2> vertices, std::vector<FaceLoop> faces)
    : Mesh2D(std::move(vertices), std::move(faces), {}, 0) {}

Mesh2D::Mesh2D(std::vector<Vec2> vertices, std::vector<FaceLoop> faces,
               std::vector<std::uint64_t> vertex_ids, std::uint64_t next_vertex_id)
    : vertices_(std::move(vertices)),
      faces_(std::move(faces)),
      vertex_ids_(std::move(vertex_ids)),
      next_vertex_id_(next_vertex_id) {
  if (vertex_ids_.empty()) {
    vertex_ids_ = sequential_ids(vertices_.size());
    next_vertex_id_ = vertices_.size();
  }
  if (vertex_ids_.size() != vertices_.size())
    throw std::invalid_argument("mesh: vertex id count does not match vertex count");
  if (faces_.empty()) throw std::invalid_argument("mesh: at least one face is required");

  std::vector<char> used(vertices_.size(), 0);
  for (const FaceLoop& loop : faces_) {
    if (loop.size() < 3) throw std::invalid_argument("mesh: face loop shorter than 3");
    for (std::size_t i = 0; i < loop.size(); ++i) {
      if (loop[i] >= vertices_.size())
        throw std::invalid_argument("mesh: face references a missing vertex");
      for (std::size_t j = i + 1; j < loop.size(); ++j)
        if (loop[i] == loop[j]) throw std::invalid_argument("mesh: vertex repeated in a face loop");
      used[loop[i]] = 1;
    }
  }
  if (std::find(used.begin(), used.end(), 0) != used.end())
    throw std::invalid_argument("mesh: isolated vertex");
  for (const Vec2& v : vertices_)
    if (!is_finite(v)) throw std::invalid_argument("mesh: non-finite vertex position");
  build_edges();
}

void Mesh2D::build_edges() {
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const FaceLoop& loop = faces_[f];
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const std::size_t from = loop[i];
      const std::size_t to = loop[(i + 1) % loop.size()];
      const auto [it, inserted] = index.try_emplace(edge_key(from, to), edges_.size());
      if (inserted) {
        edges_.push_back({std::min(from, to), std::max(from, to)});
        edge_face_count_.push_back(0);
        boundary_half_.push_back({f, from, to});
      }
      if (++edge_face_count_[it->second] > 2)
        throw std::invalid_argument("mesh: edge bounds more than two faces");
    }
  }
}

Mesh2D::BoundaryHalf Mesh2D::boundary_half(std::size_t e) const {
  if (e >= edges_.size() || edge_face_count_[e] != 1)
    throw std::invalid_argument("mesh: not a boundary edge");
  return boundary_half_[e];
}

std::size_t Mesh2D::find_edge(std::size_t a, std::size_t b) const {
  const Edge want{std::min(a, b), std::max(a, b)};
  const auto it = std::find(edges_.begin(), edges_.end(), want);
  return static_cast<std::size_t>(it - edges_.begin());
}

std::string_view to_string(TopoKind kind) {
  switch (kind) {
    case TopoKind::None: return "None";
    case TopoKind::EdgeSplit: return "EdgeSplit";
    case TopoKind::EdgeExtrude: return "EdgeExtrude";
    case TopoKind::FaceSubdivide: return "FaceSubdivide";
    case TopoKind::FaceDelete: return "FaceDelete";
  }
  return "None";
}

TopoKind topo_kind_from_string(std::string_view name) {
  for (TopoKind k : {TopoKind::None, TopoKind::EdgeSplit, TopoKind::EdgeExtrude,
                     TopoKind::FaceSubdivide, TopoKind::FaceDelete})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown topological action kind: " + std::string(name));
}

Mesh2D new_rect(Vec2 center, double width, double height) {
  return new_subdivided_rect(center, width, height, 0);
}

Mesh2D new_subdivided_rect(Vec2 center, double width, double height, int splits) {
  if (!(width > 0.0) || !(height > 0.0))
    throw std::invalid_argument("rectangle dimensions must be positive");
  if (splits < 0) throw std::invalid_argument("split count must be non-negative");
  const int n = splits + 2;  // vertices per axis
  const Vec2 origin = center - Vec2{width, height} * 0.5;
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      pts.push_back(origin + Vec2{width * i / (n - 1), height * j / (n - 1)});
  std::vector<FaceLoop> faces;
  auto at = [n](int i, int j) { return static_cast<std::size_t>(j * n + i); };
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i)
      faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
  return Mesh2D(std::move(pts), std::move(faces));
}

ElementCounts euler_counts(const Mesh2D& mesh) {
  return {mesh.num_vertices(), mesh.num_edges(), mesh.num_faces()};
}

double signed_area(const Mesh2D& mesh, std::size_t face) {
  return loop_area(mesh.vertices(), mesh.faces().at(face));
}

bool all_faces_ccw(const Mesh2D& mesh) {
  for (std::size_t f = 0; f < mesh.num_faces(); ++f)
    if (!(signed_area(mesh, f) > 0.0)) return false;
  return true;
}

Vec2 outward_normal(const Mesh2D& mesh, std::size_t edge) {
  const auto half = mesh.boundary_half(edge);
  const Vec2 d = mesh.vertices()[half.to] - mesh.vertices()[half.from];
  const double len = norm(d);
  if (!(len > 0.0)) throw std::invalid_argument("outward normal of a zero-length edge");
  return Vec2{d.y, -d.x} / len;
}

bool can_subdivide(const Mesh2D& mesh, std::size_t face) {
  const FaceLoop& loop = mesh.faces().at(face);
  const Vec2 c = loop_centroid(mesh.vertices(), loop);
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2 a = mesh.vertices()[loop[i]];
    const Vec2 b = mesh.vertices()[loop[(i + 1) % loop.size()]];
    if (!(cross(b - a, c - a) > 0.0)) return false;
  }
  return true;
}

namespace {

Mesh2D split_edge(const Mesh2D& mesh, const TopoAction& action) {
  if (action.target >= mesh.num_edges()) throw std::invalid_argument("EdgeSplit: edge index out of range");
  if (!(action.t > 0.0 && action.t < 1.0)) throw std::invalid_argument("EdgeSplit: t must lie in (0, 1)");
  const Edge e = mesh.edges()[action.target];
  std::vector<Vec2> pts = mesh.vertices();
  const std::size_t n = pts.size();
  pts.push_back(pts[e.a] + (pts[e.b] - pts[e.a]) * action.t);
  std::vector<FaceLoop> faces;
  faces.reserve(mesh.num_faces());
  for (const FaceLoop& loop : mesh.faces()) {
    FaceLoop out;
    out.reserve(loop.size() + 1);
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const std::size_t u = loop[i];
      const std::size_t v = loop[(i + 1) % loop.size()];
      out.push_back(u);
      if ((u == e.a && v == e.b) || (u == e.b && v == e.a)) out.push_back(n);
    }
    faces.push_back(std::move(out));
  }
  auto ids = mesh.vertex_ids();
  ids.push_back(mesh.next_vertex_id());
  return Mesh2D(std::move(pts), std::move(faces), std::move(ids), mesh.next_vertex_id() + 1);
}

Mesh2D extrude_edge(const Mesh2D& mesh, const TopoAction& action) {
  if (action.target >= mesh.num_edges()) throw std::invalid_argument("EdgeExtrude: edge index out of range");
  if (!mesh.is_boundary_edge(action.target))
    throw std::invalid_argument("EdgeExtrude: edge is not on the boundary");
  if (!is_finite(action.offset)) throw std::invalid_argument("EdgeExtrude: offset must be finite");
  const auto half = mesh.boundary_half(action.target);
  const Edge e = mesh.edges()[action.target];
  std::vector<Vec2> pts = mesh.vertices();
  const std::size_t n = pts.size();
  // Copies are appended in stored edge order: a' = n, b' = n + 1.
  pts.push_back(pts[e.a] + action.offset);
  pts.push_back(pts[e.b] + action.offset);
  const std::size_t from_copy = half.from == e.a ? n : n + 1;
  const std::size_t to_copy = half.to == e.a ? n : n + 1;
  FaceLoop quad{half.to, half.from, from_copy, to_copy};
  if (!(loop_area(pts, quad) > 0.0))
    throw std::invalid_argument("EdgeExtrude: offset must point outward");
  std::vector<FaceLoop> faces = mesh.faces();
  faces.push_back(std::move(quad));
  auto ids = mesh.vertex_ids();
  ids.push_back(mesh.next_vertex_id());
  ids.push_back(mesh.next_vertex_id() + 1);
  return Mesh2D(std::move(pts), std::move(faces), std::move(ids), mesh.next_vertex_id() + 2);
}

Mesh2D subdivide_face(const Mesh2D& mesh, const TopoAction& action) {
  if (action.target >= mesh.num_faces()) throw std::invalid_argument("FaceSubdivide: face index out of range");
  if (!can_subdivide(mesh, action.target))
    throw std::invalid_argument("FaceSubdivide: centroid fan is not counter-clockwise");
  const FaceLoop& loop = mesh.faces()[action.target];
  std::vector<Vec2> pts = mesh.vertices();
  const std::size_t c = pts.size();
  pts.push_back(loop_centroid(pts, loop));
  std::vector<FaceLoop> faces;
  faces.reserve(mesh.num_faces() + loop.size() - 1);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    if (f != action.target) {
      faces.push_back(mesh.faces()[f]);
      continue;
    }
    for (std::size_t i = 0; i < loop.size(); ++i)
      faces.push_back({loop[i], loop[(i + 1) % loop.size()], c});
  }
  auto ids = mesh.vertex_ids();
  ids.push_back(mesh.next_vertex_id());
  return Mesh2D(std::move(pts), std::move(faces), std::move(ids), mesh.next_vertex_id() + 1);
}

Mesh2D delete_face(const Mesh2D& mesh, const TopoAction& action) {
  if (action.target >= mesh.num_faces()) throw std::invalid_argument("FaceDelete: face index out of range");
  if (mesh.num_faces() == 1) throw std::invalid_argument("FaceDelete: cannot delete the last face");
  std::vector<char> used(mesh.num_vertices(), 0);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f)
    if (f != action.target)
      for (std::size_t v : mesh.faces()[f]) used[v] = 1;
  constexpr std::size_t kGone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> remap(mesh.num_vertices(), kGone);
  std::vector<Vec2> pts;
  std::vector<std::uint64_t> ids;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (!used[v]) continue;
    remap[v] = pts.size();
    pts.push_back(mesh.vertices()[v]);
    ids.push_back(mesh.vertex_ids()[v]);
  }
  std::vector<FaceLoop> faces;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    if (f == action.target) continue;
    FaceLoop loop = mesh.faces()[f];
    for (std::size_t& v : loop) v = remap[v];
    faces.push_back(std::move(loop));
  }
  return Mesh2D(std::move(pts), std::move(faces), std::move(ids), mesh.next_vertex_id());
}

}  // namespace

Mesh2D apply_topo(const Mesh2D& mesh, const TopoAction& action) {
  switch (action.kind) {
    case TopoKind::None: return mesh;
    case TopoKind::EdgeSplit: return split_edge(mesh, action);
    case TopoKind::EdgeExtrude: return extrude_edge(mesh, action);
    case TopoKind::FaceSubdivide: return subdivide_face(mesh, action);
    case TopoKind::FaceDelete: return delete_face(mesh, action);
  }
  throw std::invalid_argument("apply_topo: unknown action kind");
}

Mesh2D apply_geom(const Mesh2D& mesh, const GeomAction& action) {
  if (action.deltas.size() != mesh.num_vertices())
    throw std::invalid_argument("apply_geom: delta count does not match vertex count");
  std::vector<Vec2> pts = mesh.vertices();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!is_finite(action.deltas[i])) throw std::invalid_argument("apply_geom: non-finite delta");
    pts[i] += action.deltas[i];
  }
  return Mesh2D(std::move(pts), mesh.faces(), mesh.vertex_ids(), mesh.next_vertex_id());
}

std::vector<TopoAction> enumerate_valid_actions(const Mesh2D& mesh, double extrude_length) {
  std::vector<TopoAction> actions;
  for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    actions.push_back({TopoKind::EdgeSplit, e, 0.5, {}});
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.is_boundary_edge(e)) continue;
    const auto half = mesh.boundary_half(e);
    if (!(norm(mesh.vertices()[half.to] - mesh.vertices()[half.from]) > 0.0)) continue;
    actions.push_back({TopoKind::EdgeExtrude, e, 0.5, outward_normal(mesh, e) * extrude_length});
  }
  for (std::size_t f = 0; f < mesh.num_faces(); ++f)
    if (can_subdivide(mesh, f)) actions.push_back({TopoKind::FaceSubdivide, f, 0.5, {}});
  if (mesh.num_faces() > 1)
    for (std::size_t f = 0; f < mesh.num_faces(); ++f)
      actions.push_back({TopoKind::FaceDelete, f, 0.5, {}});
  return actions;
}

GeomAction displacement_between(const Mesh2D& from, const Mesh2D& to) {
  if (from.num_vertices() != to.num_vertices())
    throw std::invalid_argument("displacement_between: vertex counts differ");
  GeomAction g;
  g.deltas.resize(from.num_vertices());
  for (std::size_t i = 0; i < g.deltas.size(); ++i)
    g.deltas[i] = to.vertices()[i] - from.vertices()[i];
  return g;
}

}  // namespace polyseq
