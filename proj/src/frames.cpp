#include "polyseq/frames.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polyseq/raster.hpp"

namespace polyseq {

std::vector<Mesh2D> replay_states(const ConstructionSequence& seq) {
  std::vector<Mesh2D> states{seq.initial};
  try {
    for (const SequenceStep& s : seq.steps) states.push_back(apply_geom(apply_topo(states.back(), s.topo), s.geom));
  } catch (const std::invalid_argument& e) {
    throw ReplayMismatch(std::string("step cannot be applied: ") + e.what());
  }
  if (!(states.back() == seq.final_mesh)) throw ReplayMismatch("replayed mesh differs from the recorded final mesh");
  return states;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string frame_svg(const Mesh2D& mesh, Resolution res) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << res.width << "\" height=\"" << res.height
      << "\" viewBox=\"0 0 " << res.width << ' ' << res.height << "\">\n";
  out << "<rect width=\"" << res.width << "\" height=\"" << res.height << "\" fill=\"white\"/>\n";
  for (const FaceLoop& f : mesh.faces()) {
    out << "<polygon fill=\"#c8c8c8\" stroke=\"none\" points=\"";
    for (std::size_t k = 0; k < f.size(); ++k) {
      const Vec2& v = mesh.vertices()[f[k]];
      out << (k ? " " : "") << fmt(v.x) << ',' << fmt(v.y);
    }
    out << "\"/>\n";
  }
  for (const Edge& e : mesh.edges()) {
    const Vec2& a = mesh.vertices()[e.a];
    const Vec2& b = mesh.vertices()[e.b];
    out << "<polyline fill=\"none\" stroke=\"#202020\" stroke-width=\"0.3\" points=\"" << fmt(a.x) << ',' << fmt(a.y)
        << ' ' << fmt(b.x) << ',' << fmt(b.y) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

Image frame_raster(const Mesh2D& mesh, Resolution res) {
  Image img = render_binary(mesh, res);
  const Image silhouette = img;
  for (const Edge& e : mesh.edges()) {
    const Vec2& a = mesh.vertices()[e.a];
    const Vec2& b = mesh.vertices()[e.b];
    const int samples = std::max(1, static_cast<int>(std::ceil(4.0 * norm(b - a))));
    for (int s = 0; s <= samples; ++s) {
      const Vec2 p = a + (b - a) * (static_cast<double>(s) / samples);
      const int x = static_cast<int>(std::floor(p.x));
      const int y = static_cast<int>(std::floor(p.y));
      if (x < 0 || y < 0 || x >= res.width || y >= res.height) continue;
      img.at(x, y) = silhouette.at(x, y) >= 0.5 ? 192.0 / 255.0 : 64.0 / 255.0;
    }
  }
  return img;
}

std::vector<std::filesystem::path> write_frames(const ConstructionSequence& seq, Resolution res,
                                                const std::filesystem::path& out_dir, FrameFormat format) {
  const std::vector<Mesh2D> states = replay_states(seq);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory " + out_dir.string());
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < states.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.%s", i, format == FrameFormat::Svg ? "svg" : "png");
    const auto path = out_dir / name;
    if (format == FrameFormat::Svg) {
      std::ofstream out(path, std::ios::binary);
      out << frame_svg(states[i], res);
      if (!out) throw std::runtime_error("cannot write " + path.string());
    } else {
      save_png(frame_raster(states[i], res), path);
    }
    paths.push_back(path);
  }
  return paths;
}

}  // namespace polyseq
