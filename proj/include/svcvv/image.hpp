#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace svcvv {

// 8-bit RGB image, row-major, channels interleaved.
struct ColorImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;  // height * width * 3

  ColorImage() = default;

  ColorImage(int h, int w) : height(h), width(w) {
    if (h < 3 || w < 3) {
      throw std::invalid_argument("ColorImage: dimensions must be at least 3x3, got " +
                                  std::to_string(h) + "x" + std::to_string(w));
    }
    data.assign(static_cast<std::size_t>(h) * w * 3, 0);
  }

  std::uint8_t& at(int i, int j, int c) {
    return data[(static_cast<std::size_t>(i) * width + j) * 3 + c];
  }
  std::uint8_t at(int i, int j, int c) const {
    return data[(static_cast<std::size_t>(i) * width + j) * 3 + c];
  }
};

// Real-valued scalar field, row-major. Also used for gradient magnitude
// and per-pixel angle planes.
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<float> data;  // height * width

  GrayImage() = default;

  GrayImage(int h, int w, float fill = 0.0f) : height(h), width(w) {
    if (h < 1 || w < 1) {
      throw std::invalid_argument("GrayImage: dimensions must be positive");
    }
    data.assign(static_cast<std::size_t>(h) * w, fill);
  }

  float& at(int i, int j) { return data[static_cast<std::size_t>(i) * width + j]; }
  float at(int i, int j) const { return data[static_cast<std::size_t>(i) * width + j]; }

  bool same_dims(const GrayImage& o) const { return height == o.height && width == o.width; }
};

}  // namespace svcvv
