#include "polyseq/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace polyseq {

namespace {

Json vec_to_json(Vec2 v) { return Json::array({v.x, v.y}); }

Vec2 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a [x, y] pair");
  return Vec2{j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

Json mesh_to_json(const Mesh2D& mesh) {
  Json verts = Json::array();
  for (const Vec2& v : mesh.vertices()) verts.push_back(vec_to_json(v));
  Json faces = Json::array();
  for (const FaceLoop& loop : mesh.faces()) faces.push_back(loop);
  return Json{{"vertices", std::move(verts)}, {"faces", std::move(faces)}};
}

Mesh2D mesh_from_json(const Json& j) {
  std::vector<Vec2> verts;
  for (const Json& v : j.at("vertices")) verts.push_back(vec_from_json(v));
  std::vector<FaceLoop> faces;
  for (const Json& f : j.at("faces")) faces.push_back(f.get<FaceLoop>());
  return Mesh2D(std::move(verts), std::move(faces));
}

Json topo_to_json(const TopoAction& a) {
  Json params = Json::object();
  if (a.kind == TopoKind::EdgeSplit) params["t"] = a.t;
  if (a.kind == TopoKind::EdgeExtrude) params["offset"] = vec_to_json(a.offset);
  return Json{{"kind", std::string(to_string(a.kind))}, {"target", a.target}, {"params", std::move(params)}};
}

TopoAction topo_from_json(const Json& j) {
  TopoAction a;
  a.kind = topo_kind_from_string(j.at("kind").get<std::string>());
  a.target = j.at("target").get<std::size_t>();
  const Json& p = j.at("params");
  if (a.kind == TopoKind::EdgeSplit) a.t = p.at("t").get<double>();
  if (a.kind == TopoKind::EdgeExtrude) a.offset = vec_from_json(p.at("offset"));
  return a;
}

Json geom_to_json(const GeomAction& g) {
  Json d = Json::array();
  for (const Vec2& v : g.deltas) d.push_back(vec_to_json(v));
  return Json{{"deltas", std::move(d)}};
}

GeomAction geom_from_json(const Json& j) {
  GeomAction g;
  for (const Json& v : j.at("deltas")) g.deltas.push_back(vec_from_json(v));
  return g;
}

Json reward_to_json(const RewardBreakdown& r) {
  return Json{{"r_sm", r.r_sm}, {"r_sc", r.r_sc}, {"r_si", r.r_si}, {"r_all", r.r_all}};
}

RewardBreakdown reward_from_json(const Json& j) {
  return {j.at("r_sm").get<double>(), j.at("r_sc").get<double>(), j.at("r_si").get<double>(),
          j.at("r_all").get<double>()};
}

Json metrics_to_json(const MetricsReport& m) {
  return Json{{"iou", m.iou}, {"complexity", m.complexity}, {"self_intersections", m.self_intersections}};
}

Json tps_to_json(const TpsParams& p) {
  const auto& a = p.affine;
  Json disp = Json::array();
  for (const Vec2& d : p.displacement) disp.push_back(vec_to_json(d));
  return Json{{"grid_size", p.grid_size},
              {"affine", Json::array({Json::array({a[0], a[1], a[2]}), Json::array({a[3], a[4], a[5]})})},
              {"displacement", std::move(disp)}};
}

TpsParams tps_from_json(const Json& j) {
  TpsParams p;
  p.grid_size = j.at("grid_size").get<int>();
  const Json& a = j.at("affine");
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) p.affine[r * 3 + c] = a.at(r).at(c).get<double>();
  for (const Json& d : j.at("displacement")) p.displacement.push_back(vec_from_json(d));
  return p;
}

Json sequence_to_json(const ConstructionSequence& seq, const Json& config_echo, std::uint64_t seed) {
  Json steps = Json::array();
  for (const SequenceStep& s : seq.steps)
    steps.push_back(Json{{"topo", topo_to_json(s.topo)}, {"geom", geom_to_json(s.geom)}, {"reward", reward_to_json(s.reward)}});
  return Json{{"initial", mesh_to_json(seq.initial)},
              {"steps", std::move(steps)},
              {"final", mesh_to_json(seq.final_mesh)},
              {"config_echo", config_echo},
              {"seed", seed}};
}

ConstructionSequence sequence_from_json(const Json& j) {
  ConstructionSequence seq{mesh_from_json(j.at("initial")), {}, mesh_from_json(j.at("final"))};
  for (const Json& s : j.at("steps"))
    seq.steps.push_back({topo_from_json(s.at("topo")), geom_from_json(s.at("geom")), reward_from_json(s.at("reward"))});
  return seq;
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return Json::parse(in);
}

}  // namespace polyseq
