#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyseq {

struct Resolution {
  int width = 64;
  int height = 64;
  bool operator==(const Resolution&) const = default;
  std::size_t pixels() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
};

/// Row-major grayscale raster with values in [0, 1]. Used both for soft
/// renders and for binary silhouettes.
class Image {
 public:
  Image() = default;
  explicit Image(Resolution res, double fill = 0.0);
  Image(Resolution res, std::vector<double> data);

  Resolution resolution() const { return res_; }
  int width() const { return res_.width; }
  int height() const { return res_.height; }
  std::size_t size() const { return data_.size(); }

  double& at(int x, int y) { return data_[index(x, y)]; }
  double at(int x, int y) const { return data_[index(x, y)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(res_.width) + static_cast<std::size_t>(x);
  }
  Resolution res_{0, 0};
  std::vector<double> data_;
};

/// Values >= 0.5 become 1, others 0.
Image binarize(const Image& img);

/// Raised for unreadable, unwritable or malformed image files.
class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loads an 8-bit grayscale PNG (other PNG color types are converted to gray)
/// or a binary PGM (P5); values are scaled by 1/255.
Image load_image(const std::filesystem::path& path);

/// Loads an image and thresholds it: bytes >= 128 are foreground.
Image load_silhouette(const std::filesystem::path& path);

/// Writes round(255 * v) per pixel as 8-bit grayscale PNG.
void save_png(const Image& img, const std::filesystem::path& path);
/// Writes a binary PGM (P5), maxval 255.
void save_pgm(const Image& img, const std::filesystem::path& path);

}  // namespace polyseq
