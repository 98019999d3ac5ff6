#include "polyseq/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace polyseq {

Image::Image(Resolution res, double fill) : res_(res) {
  if (res.width <= 0 || res.height <= 0) throw std::invalid_argument("image: resolution must be positive");
  data_.assign(res.pixels(), fill);
}

Image::Image(Resolution res, std::vector<double> data) : res_(res), data_(std::move(data)) {
  if (res.width <= 0 || res.height <= 0) throw std::invalid_argument("image: resolution must be positive");
  if (data_.size() != res.pixels()) throw std::invalid_argument("image: data size does not match resolution");
}

Image binarize(const Image& img) {
  Image out = img;
  for (double& v : out.data()) v = v >= 0.5 ? 1.0 : 0.0;
  return out;
}

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw ImageIoError("cannot read PNG " + path.string() + ": " + image.message);
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw ImageIoError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  const Resolution res{static_cast<int>(image.width), static_cast<int>(image.height)};
  std::vector<double> data(buf.size());
  std::transform(buf.begin(), buf.end(), data.begin(), [](std::uint8_t b) { return b / 255.0; });
  return Image(res, std::move(data));
}

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw ImageIoError("not a binary PGM: " + path.string());
  auto next_int = [&]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    int v = 0;
    if (!(in >> v)) throw ImageIoError("malformed PGM header: " + path.string());
    return v;
  };
  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) throw ImageIoError("unsupported PGM: " + path.string());
  in.get();
  std::vector<char> buf(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size())))
    throw ImageIoError("truncated PGM: " + path.string());
  std::vector<double> data(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i)
    data[i] = static_cast<std::uint8_t>(buf[i]) / static_cast<double>(maxval);
  return Image({w, h}, std::move(data));
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw ImageIoError("cannot open " + path.string());
  char head[2] = {0, 0};
  probe.read(head, 2);
  probe.close();
  if (head[0] == 'P' && head[1] == '5') return load_pgm(path);
  return load_png(path);
}

Image load_silhouette(const std::filesystem::path& path) {
  Image img = load_image(path);
  // Compare on the byte scale so that 128/255 counts as foreground.
  for (double& v : img.data()) v = std::lround(v * 255.0) >= 128 ? 1.0 : 0.0;
  return img;
}

void save_png(const Image& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> buf(img.size());
  std::transform(img.data().begin(), img.data().end(), buf.begin(), to_byte);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw ImageIoError("cannot write " + path.string());
  if (!png_image_write_to_stdio(&image, f.get(), 0, buf.data(), 0, nullptr))
    throw ImageIoError("PNG encoding failed for " + path.string() + ": " + image.message);
}

void save_pgm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (double v : img.data()) out.put(static_cast<char>(to_byte(v)));
  if (!out) throw ImageIoError("write failed for " + path.string());
}

}  // namespace polyseq
