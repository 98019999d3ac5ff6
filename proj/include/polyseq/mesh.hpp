#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "polyseq/geometry.hpp"

namespace polyseq {

using FaceLoop = std::vector<std::size_t>;

/// Unordered vertex pair, stored with a < b.
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  bool operator==(const Edge&) const = default;
};

struct ElementCounts {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t faces = 0;
  bool operator==(const ElementCounts&) const = default;
};

/// Indexed planar polygon mesh. Immutable after construction; every edit
/// produces a new mesh. Edges are derived from the face loops in first-seen
/// order (face order, then loop order), so they carry no independent state.
class Mesh2D {
 public:
  /// Builds a mesh and checks the structural invariants: loops of length >= 3
  /// over existing vertices without repeats, every edge shared by one or two
  /// faces, no isolated vertices, at least one face. Throws
  /// std::invalid_argument on violation. Orientation is not checked here; see
  /// all_faces_ccw().
  Mesh2D(std::vector<Vec2> vertices, std::vector<FaceLoop> faces);

  /// As above, with explicit stable vertex identities.
  Mesh2D(std::vector<Vec2> vertices, std::vector<FaceLoop> faces,
         std::vector<std::uint64_t> vertex_ids, std::uint64_t next_vertex_id);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<FaceLoop>& faces() const { return faces_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::uint64_t>& vertex_ids() const { return vertex_ids_; }
  std::uint64_t next_vertex_id() const { return next_vertex_id_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_faces() const { return faces_.size(); }

  /// Number of faces bounded by edge `e` (1 or 2).
  int edge_face_count(std::size_t e) const { return edge_face_count_[e]; }
  bool is_boundary_edge(std::size_t e) const { return edge_face_count_[e] == 1; }

  /// For a boundary edge: the owning face and the directed pair (from, to) in
  /// the order the face loop traverses it.
  struct BoundaryHalf {
    std::size_t face;
    std::size_t from;
    std::size_t to;
  };
  BoundaryHalf boundary_half(std::size_t e) const;

  /// Index of edge {a, b}, or num_edges() when absent.
  std::size_t find_edge(std::size_t a, std::size_t b) const;

  /// Geometry and connectivity equality. Vertex identities are bookkeeping and
  /// do not participate.
  bool operator==(const Mesh2D& other) const {
    return vertices_ == other.vertices_ && faces_ == other.faces_;
  }

 private:
  void build_edges();

  std::vector<Vec2> vertices_;
  std::vector<FaceLoop> faces_;
  std::vector<std::uint64_t> vertex_ids_;
  std::uint64_t next_vertex_id_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> edge_face_count_;
  std::vector<BoundaryHalf> boundary_half_;
};

enum class TopoKind { None, EdgeSplit, EdgeExtrude, FaceSubdivide, FaceDelete };

std::string_view to_string(TopoKind kind);
/// Throws std::invalid_argument for unknown names.
TopoKind topo_kind_from_string(std::string_view name);

/// One topological edit. `target` indexes an edge (split, extrude) or a face
/// (subdivide, delete) of the mesh the action is applied to. `None` is the
/// identity edit used by fixed-topology baselines.
struct TopoAction {
  TopoKind kind = TopoKind::None;
  std::size_t target = 0;
  double t = 0.5;     // EdgeSplit parameter along the stored edge (a -> b)
  Vec2 offset{};      // EdgeExtrude translation of the new edge copy

  bool operator==(const TopoAction&) const = default;
};

/// Dense per-vertex translation field, in the mesh's vertex order.
struct GeomAction {
  std::vector<Vec2> deltas;
  bool operator==(const GeomAction&) const = default;
};

/// Axis-aligned rectangle, 4 vertices, 4 edges, 1 CCW face.
Mesh2D new_rect(Vec2 center, double width, double height);

/// Rectangle cut `splits` times per axis into a grid of quads. With the
/// default of 2 cuts: 16 vertices, 24 edges, 9 faces.
Mesh2D new_subdivided_rect(Vec2 center, double width, double height, int splits = 2);

ElementCounts euler_counts(const Mesh2D& mesh);

/// Signed shoelace area; positive for counter-clockwise loops.
double signed_area(const Mesh2D& mesh, std::size_t face);
bool all_faces_ccw(const Mesh2D& mesh);

/// Applies a topological edit and returns the edited mesh. Throws
/// std::invalid_argument for an out-of-range target, extrusion of an interior
/// edge or with a non-outward offset, deletion of the last face, a split
/// parameter outside (0, 1), or a subdivision whose centroid fan would not be
/// counter-clockwise.
Mesh2D apply_topo(const Mesh2D& mesh, const TopoAction& action);

/// Translates every vertex by its delta. Throws std::invalid_argument on a
/// length mismatch or non-finite delta.
Mesh2D apply_geom(const Mesh2D& mesh, const GeomAction& action);

/// Outward unit normal of a boundary edge (right-hand side of the owning
/// face's traversal direction).
Vec2 outward_normal(const Mesh2D& mesh, std::size_t edge);

/// Whether subdividing `face` around its vertex centroid yields only
/// counter-clockwise triangles.
bool can_subdivide(const Mesh2D& mesh, std::size_t face);

/// Every valid canonical edit, ordered by kind then element index:
/// splits (t = 0.5) of all edges, outward extrusions by `extrude_length` of all
/// boundary edges, subdivisions, and deletions (only while |F| > 1).
std::vector<TopoAction> enumerate_valid_actions(const Mesh2D& mesh,
                                                double extrude_length = 8.0);

/// Geometric displacement that turns `from` into `to` (same vertex count).
GeomAction displacement_between(const Mesh2D& from, const Mesh2D& to);

}  // namespace polyseq
