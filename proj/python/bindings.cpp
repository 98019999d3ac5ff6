#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "polyseq/commands.hpp"
#include "polyseq/dataset.hpp"
#include "polyseq/inverse.hpp"
#include "polyseq/metrics.hpp"
#include "polyseq/raster.hpp"
#include "polyseq/tps.hpp"

namespace py = pybind11;
using namespace polyseq;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image to_image(const Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("image must be a 2-D array (height, width)");
  const Resolution res{static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0))};
  return Image(res, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Image& img) {
  Array out({img.height(), img.width()});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

Array to_array(const std::vector<Vec2>& pts) {
  Array out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(static_cast<py::ssize_t>(i), 0) = pts[i].x;
    m(static_cast<py::ssize_t>(i), 1) = pts[i].y;
  }
  return out;
}

std::vector<Vec2> to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw std::invalid_argument("expected an (n, 2) array");
  std::vector<Vec2> pts;
  auto m = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts.push_back({m(i, 0), m(i, 1)});
  return pts;
}

Resolution to_res(std::pair<int, int> wh) { return {wh.first, wh.second}; }

RunConfig config_from(const std::string& text) { return parse_run_config(text); }

py::dict reward_dict(const RewardBreakdown& r) {
  py::dict d;
  d["r_sm"] = r.r_sm;
  d["r_sc"] = r.r_sc;
  d["r_si"] = r.r_si;
  d["r_all"] = r.r_all;
  return d;
}

std::string sequence_text(const ConstructionSequence& seq, const RunConfig& cfg) {
  return sequence_to_json(seq, run_config_to_json(cfg), cfg.planner.seed).dump(2);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polygon-mesh construction sequences from silhouettes";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ReplayMismatch>(m, "ReplayMismatch", PyExc_RuntimeError);
  py::register_exception<ImageIoError>(m, "ImageIoError", PyExc_OSError);

  py::class_<TopoAction>(m, "TopoAction")
      .def(py::init([](const std::string& kind, std::size_t target, double t, std::pair<double, double> offset) {
             return TopoAction{topo_kind_from_string(kind), target, t, {offset.first, offset.second}};
           }),
           py::arg("kind"), py::arg("target") = 0, py::arg("t") = 0.5,
           py::arg("offset") = std::pair<double, double>{0.0, 0.0})
      .def_property_readonly("kind", [](const TopoAction& a) { return std::string(to_string(a.kind)); })
      .def_readonly("target", &TopoAction::target)
      .def_readonly("t", &TopoAction::t)
      .def_property_readonly("offset", [](const TopoAction& a) { return std::make_pair(a.offset.x, a.offset.y); })
      .def("__eq__", [](const TopoAction& a, const TopoAction& b) { return a == b; })
      .def("__repr__", [](const TopoAction& a) {
        std::ostringstream s;
        s << "TopoAction(" << to_string(a.kind) << ", target=" << a.target << ")";
        return s.str();
      });

  py::class_<Mesh2D>(m, "Mesh")
      .def(py::init([](const Array& vertices, std::vector<FaceLoop> faces) {
             return Mesh2D(to_points(vertices), std::move(faces));
           }),
           py::arg("vertices"), py::arg("faces"))
      .def_property_readonly("vertices", [](const Mesh2D& mesh) { return to_array(mesh.vertices()); })
      .def_property_readonly("faces", &Mesh2D::faces)
      .def_property_readonly("edges",
                             [](const Mesh2D& mesh) {
                               std::vector<std::pair<std::size_t, std::size_t>> out;
                               for (const Edge& e : mesh.edges()) out.emplace_back(e.a, e.b);
                               return out;
                             })
      .def("counts",
           [](const Mesh2D& mesh) {
             const ElementCounts c = euler_counts(mesh);
             return py::make_tuple(c.vertices, c.edges, c.faces);
           })
      .def("to_json", [](const Mesh2D& mesh) { return mesh_to_json(mesh).dump(); })
      .def_static("from_json", [](const std::string& text) { return mesh_from_json(Json::parse(text)); })
      .def("__eq__", [](const Mesh2D& a, const Mesh2D& b) { return a == b; });

  m.def("new_rect", [](std::pair<double, double> c, double w, double h) { return new_rect({c.first, c.second}, w, h); },
        py::arg("center"), py::arg("width"), py::arg("height"));
  m.def("new_subdivided_rect",
        [](std::pair<double, double> c, double w, double h, int splits) {
          return new_subdivided_rect({c.first, c.second}, w, h, splits);
        },
        py::arg("center"), py::arg("width"), py::arg("height"), py::arg("splits") = 2);
  m.def("default_initial_rect", [](std::pair<int, int> res) { return default_initial_rect(to_res(res)); },
        py::arg("res") = std::pair<int, int>{64, 64});
  m.def("apply_topo", &apply_topo, py::arg("mesh"), py::arg("action"));
  m.def("apply_geom", [](const Mesh2D& mesh, const Array& deltas) { return apply_geom(mesh, {to_points(deltas)}); },
        py::arg("mesh"), py::arg("deltas"));
  m.def("enumerate_valid_actions", &enumerate_valid_actions, py::arg("mesh"), py::arg("extrude_length") = 8.0);

  m.def("render_soft",
        [](const Mesh2D& mesh, std::pair<int, int> res, double sigma) {
          return to_array(render_soft(mesh, to_res(res), sigma));
        },
        py::arg("mesh"), py::arg("res") = std::pair<int, int>{64, 64}, py::arg("sigma") = 1.0);
  m.def("render_binary",
        [](const Mesh2D& mesh, std::pair<int, int> res) { return to_array(render_binary(mesh, to_res(res))); },
        py::arg("mesh"), py::arg("res") = std::pair<int, int>{64, 64});
  m.def("loss_mse", [](const Array& a, const Array& b) { return loss_mse(to_image(a), to_image(b)); });
  m.def("loss_gradient",
        [](const Mesh2D& mesh, const Array& target, double sigma) {
          const LossGradient lg = loss_gradient(mesh, to_image(target), sigma);
          return py::make_tuple(lg.loss, to_array(lg.gradient));
        },
        py::arg("mesh"), py::arg("target"), py::arg("sigma") = 1.0);

  m.def("iou", [](const Array& a, const Array& b) { return iou(to_image(a), to_image(b)); });
  m.def("complexity", &complexity);
  m.def("self_intersections", &self_intersections);
  m.def("compute_reward",
        [](const Mesh2D& mesh, const Array& target, std::tuple<double, double, double> w) {
          const RewardWeights weights{std::get<0>(w), std::get<1>(w), std::get<2>(w)};
          weights.validate();
          return reward_dict(compute_reward(mesh, to_image(target), weights));
        },
        py::arg("mesh"), py::arg("target"), py::arg("weights") = std::make_tuple(100.0, 1.0, 5.0));

  m.def("estimate",
        [](const Mesh2D& mesh, const Array& target, int iterations, double sigma) {
          OptimConfig cfg;
          cfg.iterations = iterations;
          cfg.sigma = sigma;
          cfg.validate();
          const Estimate e = estimate(mesh, to_image(target), cfg);
          return py::make_tuple(to_array(e.geom.deltas), e.trace.losses);
        },
        py::arg("mesh"), py::arg("target"), py::arg("iterations") = 200, py::arg("sigma") = 1.0);
  m.def("fast_estimate",
        [](const Mesh2D& mesh, const Array& target, int grid_size, int iterations) {
          return to_array(fast_estimate(mesh, to_image(target), TpsConfig{grid_size, iterations}, 1.0).deltas);
        },
        py::arg("mesh"), py::arg("target"), py::arg("grid_size") = 8, py::arg("iterations") = 100);
  m.def("warp_image",
        [](const std::string& params_json, const Array& source) {
          return to_array(warp_image(tps_from_json(Json::parse(params_json)), to_image(source)));
        },
        py::arg("params_json"), py::arg("source"));
  m.def("fit_tps",
        [](const Array& source, const Array& target, int grid_size, int iterations) {
          const TpsFit fit = fit_tps(to_image(source), to_image(target), grid_size, iterations);
          return py::make_tuple(tps_to_json(fit.params).dump(), fit.losses);
        },
        py::arg("source"), py::arg("target"), py::arg("grid_size") = 8, py::arg("iterations") = 100);

  m.def("solve",
        [](const Array& target, const std::string& config) {
          const RunConfig cfg = config_from(config);
          return sequence_text(cli::solve_target(to_image(target), cfg), cfg);
        },
        py::arg("target"), py::arg("config") = "",
        "Runs the search from the default rectangle; returns the sequence JSON. `config` uses key = value lines.");
  m.def("baseline_dr",
        [](const Array& target, const std::string& variant, const std::string& config) {
          if (variant != "simple" && variant != "complex") throw ConfigError("variant must be simple or complex");
          const RunConfig cfg = config_from(config);
          const auto v = variant == "complex" ? cli::Variant::Complex : cli::Variant::Simple;
          return sequence_text(cli::baseline_dr(to_image(target), v, cfg), cfg);
        },
        py::arg("target"), py::arg("variant") = "simple", py::arg("config") = "");
  m.def("replay",
        [](const std::string& sequence_json) { return replay_states(sequence_from_json(Json::parse(sequence_json))).back(); },
        py::arg("sequence_json"));
  m.def("random_sequence",
        [](std::size_t index, const std::string& config) {
          const RunConfig cfg = config_from(config);
          const GeneratedShape s = random_sequence(cfg.gen, index);
          return py::make_tuple(sequence_to_json(s.truth, gen_config_to_json(cfg.gen), cfg.gen.seed).dump(2),
                                to_array(s.target));
        },
        py::arg("index"), py::arg("config") = "");
  m.def("run_cli",
        [](std::vector<std::string> args) {
          args.insert(args.begin(), "polyseq");
          std::vector<const char*> argv;
          for (const auto& a : args) argv.push_back(a.c_str());
          std::ostringstream out, err;
          const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a subcommand in-process; returns (exit code, stdout, stderr).");
}
