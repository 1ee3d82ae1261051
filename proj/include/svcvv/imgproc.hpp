#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "svcvv/image.hpp"

// Low-level image operations feeding the visual-vertical estimator.
// All convolutions use edge replication at the borders.
namespace svcvv::imgproc {

namespace detail {

inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Separable 1-D convolution along rows (horizontal = true) or columns,
// replicating edge pixels. Borders are handled separately so the interior
// loops stay branch-free.
template <std::size_t K>
GrayImage convolve_1d(const GrayImage& img, const std::array<float, K>& kernel, bool horizontal) {
  static_assert(K % 2 == 1);
  constexpr int r = static_cast<int>(K) / 2;
  const int h = img.height;
  const int w = img.width;
  GrayImage out(h, w);
  if (horizontal) {
    const int lo = std::min(r, w);
    const int hi = std::max(lo, w - r);
    for (int i = 0; i < h; ++i) {
      const float* src = img.data.data() + static_cast<std::size_t>(i) * w;
      float* dst = out.data.data() + static_cast<std::size_t>(i) * w;
      for (int j = 0; j < lo; ++j) {
        float acc = 0.0f;
        for (int k = 0; k < static_cast<int>(K); ++k) {
          acc += kernel[static_cast<std::size_t>(k)] * src[clamp_index(j + k - r, w)];
        }
        dst[j] = acc;
      }
      for (int j = lo; j < hi; ++j) {
        float acc = 0.0f;
        for (int k = 0; k < static_cast<int>(K); ++k) {
          acc += kernel[static_cast<std::size_t>(k)] * src[j + k - r];
        }
        dst[j] = acc;
      }
      for (int j = hi; j < w; ++j) {
        float acc = 0.0f;
        for (int k = 0; k < static_cast<int>(K); ++k) {
          acc += kernel[static_cast<std::size_t>(k)] * src[clamp_index(j + k - r, w)];
        }
        dst[j] = acc;
      }
    }
  } else {
    for (int i = 0; i < h; ++i) {
      float* dst = out.data.data() + static_cast<std::size_t>(i) * w;
      for (int k = 0; k < static_cast<int>(K); ++k) {
        const float kv = kernel[static_cast<std::size_t>(k)];
        const float* src =
            img.data.data() + static_cast<std::size_t>(clamp_index(i + k - r, h)) * w;
        for (int j = 0; j < w; ++j) dst[j] += kv * src[j];
      }
    }
  }
  return out;
}

inline std::array<float, 11> gaussian_kernel_11(double sigma) {
  std::array<float, 11> k{};
  double sum = 0.0;
  for (int i = 0; i < 11; ++i) {
    const double x = i - 5;
    const double v = std::exp(-x * x / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i)] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : k) v = static_cast<float>(v / sum);
  return k;
}

}  // namespace detail

inline constexpr double kGaussianSigma = 2.15;

// ITU-R BT.601 luma.
inline GrayImage to_gray(const ColorImage& img) {
  GrayImage out(img.height, img.width);
  for (int i = 0; i < img.height; ++i) {
    for (int j = 0; j < img.width; ++j) {
      out.at(i, j) = 0.299f * img.at(i, j, 0) + 0.587f * img.at(i, j, 1) +
                     0.114f * img.at(i, j, 2);
    }
  }
  return out;
}

inline GrayImage gaussian_blur(const GrayImage& img) {
  if (img.height < 11 || img.width < 11) {
    throw std::invalid_argument("gaussian_blur: image smaller than 11x11 kernel");
  }
  static const std::array<float, 11> kernel = detail::gaussian_kernel_11(kGaussianSigma);
  return detail::convolve_1d(detail::convolve_1d(img, kernel, true), kernel, false);
}

// (x - min) / (max - min); constant images map to all zeros.
inline GrayImage minmax_normalize(const GrayImage& img) {
  const auto [mn_it, mx_it] = std::minmax_element(img.data.begin(), img.data.end());
  const float mn = *mn_it;
  const float mx = *mx_it;
  GrayImage out(img.height, img.width);
  if (mx > mn) {
    const float scale = 1.0f / (mx - mn);
    std::transform(img.data.begin(), img.data.end(), out.data.begin(),
                   [&](float v) { return (v - mn) * scale; });
  }
  return out;
}

// 3x3 Sobel. gy is negated: camera rows grow downward while the head
// longitudinal axis points up.
inline std::pair<GrayImage, GrayImage> sobel_gradients(const GrayImage& img) {
  if (img.height < 3 || img.width < 3) {
    throw std::invalid_argument("sobel_gradients: image smaller than 3x3");
  }
  static constexpr std::array<float, 3> smooth{1.0f, 2.0f, 1.0f};
  static constexpr std::array<float, 3> diff{-1.0f, 0.0f, 1.0f};
  GrayImage gx = detail::convolve_1d(detail::convolve_1d(img, diff, true), smooth, false);
  GrayImage gy = detail::convolve_1d(detail::convolve_1d(img, smooth, true), diff, false);
  for (auto& v : gy.data) v = -v;
  return {std::move(gx), std::move(gy)};
}

// Magnitude and folded angle planes. Angles are degrees in [0, 180):
// the two-argument arctangent result is mapped to [0, 360) and angles
// in [180, 360) are folded down by 180.
inline std::pair<GrayImage, GrayImage> magnitude_angle(const GrayImage& gx, const GrayImage& gy) {
  if (!gx.same_dims(gy)) {
    throw std::invalid_argument("magnitude_angle: gradient planes differ in size");
  }
  GrayImage mag(gx.height, gx.width);
  GrayImage ang(gx.height, gx.width);
  for (std::size_t p = 0; p < gx.data.size(); ++p) {
    const float x = gx.data[p];
    const float y = gy.data[p];
    mag.data[p] = std::sqrt(x * x + y * y);
    float a = std::atan2(y, x) * (180.0f / 3.14159265358979323846f);
    if (a < 0.0f) a += 360.0f;
    if (a >= 360.0f) a = 0.0f;
    if (a >= 180.0f) a -= 180.0f;
    ang.data[p] = a;
  }
  return {std::move(mag), std::move(ang)};
}

inline GrayImage threshold_below(const GrayImage& mag, float cutoff) {
  GrayImage out(mag.height, mag.width);
  std::transform(mag.data.begin(), mag.data.end(), out.data.begin(),
                 [&](float v) { return v < cutoff ? 0.0f : v; });
  return out;
}

// Grayscale erosion with a full 3x3 structuring element.
inline GrayImage erode3x3(const GrayImage& img) {
  if (img.height < 3 || img.width < 3) {
    throw std::invalid_argument("erode3x3: image smaller than 3x3");
  }
  const int h = img.height;
  const int w = img.width;
  // separable: horizontal 3-wide min, then vertical
  GrayImage tmp(h, w);
  for (int i = 0; i < h; ++i) {
    const float* src = img.data.data() + static_cast<std::size_t>(i) * w;
    float* dst = tmp.data.data() + static_cast<std::size_t>(i) * w;
    dst[0] = std::min(src[0], src[1]);
    for (int j = 1; j < w - 1; ++j) dst[j] = std::min({src[j - 1], src[j], src[j + 1]});
    dst[w - 1] = std::min(src[w - 2], src[w - 1]);
  }
  GrayImage out(h, w);
  for (int i = 0; i < h; ++i) {
    const float* up = tmp.data.data() + static_cast<std::size_t>(std::max(i - 1, 0)) * w;
    const float* mid = tmp.data.data() + static_cast<std::size_t>(i) * w;
    const float* dn = tmp.data.data() + static_cast<std::size_t>(std::min(i + 1, h - 1)) * w;
    float* dst = out.data.data() + static_cast<std::size_t>(i) * w;
    for (int j = 0; j < w; ++j) dst[j] = std::min({up[j], mid[j], dn[j]});
  }
  return out;
}

}  // namespace svcvv::imgproc
