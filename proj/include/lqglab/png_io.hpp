#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lqglab {

/// 8-bit RGB raster with (0,0) at the top-left.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> rgb;

  Image(int w, int h, unsigned char fill = 255)
      : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, fill) {}

  void set(int x, int y, unsigned char r, unsigned char g, unsigned char b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const std::size_t o = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[o] = r;
    rgb[o + 1] = g;
    rgb[o + 2] = b;
  }
};

/// Minimal PNG encoder (stored deflate blocks).  Output bytes are a pure
/// function of the pixel data, which the determinism contracts rely on.
void write_png(const Image& img, const std::string& path);

}  // namespace lqglab
