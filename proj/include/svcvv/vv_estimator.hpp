#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "svcvv/imgproc.hpp"
#include "svcvv/vec3.hpp"

// Visual-vertical estimation: per-frame gradient-orientation histogram,
// top-3 selection inside the [30, 150] degree band, and exponential
// smoothing against the previous frame's estimate.
namespace svcvv {

inline constexpr int kHistogramBins = 180;
inline constexpr int kBandLowDeg = 30;
inline constexpr int kBandHighDeg = 150;
inline constexpr int kBandBins = kBandHighDeg - kBandLowDeg + 1;  // 121
inline constexpr float kMagnitudeCutoff = 0.25f;
inline constexpr double kGravityNorm = 9.81;
inline constexpr double kThetaSmoothing = 0.7;  // weight on the current frame

struct AngleHistogram {
  std::array<double, kHistogramBins> bins{};
};

// Offsets are band-relative: offset d corresponds to absolute angle d + 30.
struct Top3 {
  std::array<int, 3> offsets{};
  std::array<double, 3> weights{};  // normalized to sum 1
};

// Per-frame result before smoothing. has_edges is false when the whole
// band is empty (e.g. a featureless frame).
struct FrameAngle {
  bool has_edges = false;
  double raw_theta = 90.0;  // degrees, in [30, 150] when has_edges
};

struct VvEstimate {
  double theta_vv = 90.0;  // degrees
  Vec3 vv;                 // m/s^2, z = 0, norm 9.81
  long frame_index = 0;
};

struct VvEstimatorState {
  double theta_prev = 90.0;
};

inline AngleHistogram weighted_histogram(const GrayImage& angle, const GrayImage& mag) {
  if (!angle.same_dims(mag)) {
    throw std::invalid_argument("weighted_histogram: angle/magnitude size mismatch");
  }
  AngleHistogram hist;
  for (std::size_t p = 0; p < angle.data.size(); ++p) {
    const int d = std::clamp(static_cast<int>(std::floor(angle.data[p])), 0, kHistogramBins - 1);
    hist.bins[static_cast<std::size_t>(d)] += mag.data[p];
  }
  return hist;
}

// Highest three counts among the 121 band bins; ties resolved toward the
// smaller offset. Returns nullopt when the band is entirely empty.
inline std::optional<Top3> top3_in_band(const AngleHistogram& hist) {
  std::array<int, kBandBins> order{};
  std::iota(order.begin(), order.end(), 0);
  const auto count = [&](int offset) { return hist.bins[static_cast<std::size_t>(offset + kBandLowDeg)]; };
  std::partial_sort(order.begin(), order.begin() + 3, order.end(), [&](int a, int b) {
    const double ca = count(a);
    const double cb = count(b);
    return ca != cb ? ca > cb : a < b;
  });
  double total = 0.0;
  for (int off : order) total += count(off);
  if (total <= 0.0) return std::nullopt;

  Top3 top;
  double top_sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    top.offsets[static_cast<std::size_t>(k)] = order[static_cast<std::size_t>(k)];
    top_sum += count(order[static_cast<std::size_t>(k)]);
  }
  for (int k = 0; k < 3; ++k) {
    top.weights[static_cast<std::size_t>(k)] = count(order[static_cast<std::size_t>(k)]) / top_sum;
  }
  return top;
}

inline double smooth_theta(double raw_theta, VvEstimatorState& state) {
  const double theta = kThetaSmoothing * raw_theta + (1.0 - kThetaSmoothing) * state.theta_prev;
  state.theta_prev = theta;
  return theta;
}

inline Vec3 vv_vector(double theta_deg) {
  const double rad = theta_deg * 3.14159265358979323846 / 180.0;
  return {kGravityNorm * std::cos(rad), kGravityNorm * std::sin(rad), 0.0};
}

// Pure per-frame half of the estimator (parallelizable across frames):
// preprocessing, gradients, histogram, top-3, weighted raw angle.
inline FrameAngle analyze_frame(const ColorImage& img) {
  using namespace imgproc;
  GrayImage gray = minmax_normalize(gaussian_blur(to_gray(img)));
  auto [gx, gy] = sobel_gradients(gray);
  GrayImage mag(gx.height, gx.width);
  for (std::size_t p = 0; p < mag.data.size(); ++p) {
    mag.data[p] = std::sqrt(gx.data[p] * gx.data[p] + gy.data[p] * gy.data[p]);
  }
  mag = erode3x3(threshold_below(minmax_normalize(mag), kMagnitudeCutoff));
  // Zero-weight pixels cannot move the histogram, so the orientation is
  // only evaluated where the eroded magnitude survived.
  AngleHistogram hist;
  for (std::size_t p = 0; p < mag.data.size(); ++p) {
    if (mag.data[p] <= 0.0f) continue;
    float a = std::atan2(gy.data[p], gx.data[p]) * (180.0f / 3.14159265358979323846f);
    if (a < 0.0f) a += 360.0f;
    if (a >= 360.0f) a = 0.0f;
    if (a >= 180.0f) a -= 180.0f;
    const int d = std::clamp(static_cast<int>(std::floor(a)), 0, kHistogramBins - 1);
    hist.bins[static_cast<std::size_t>(d)] += mag.data[p];
  }
  const auto top = top3_in_band(hist);
  if (!top) return {};
  double weighted = 0.0;
  for (int k = 0; k < 3; ++k) {
    weighted += top->offsets[static_cast<std::size_t>(k)] * top->weights[static_cast<std::size_t>(k)];
  }
  return {true, weighted + kBandLowDeg};
}

// Sequential half: fold one frame's raw angle into the smoothed estimate.
// Empty frames hold the previous estimate.
inline double update_theta(const FrameAngle& frame, VvEstimatorState& state) {
  if (!frame.has_edges) return state.theta_prev;
  return smooth_theta(frame.raw_theta, state);
}

inline VvEstimate estimate_frame(const ColorImage& img, VvEstimatorState& state,
                                 long frame_index = 0) {
  const double theta = update_theta(analyze_frame(img), state);
  return {theta, vv_vector(theta), frame_index};
}

}  // namespace svcvv
