#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "svcvv/synth.hpp"
#include "svcvv/vv_estimator.hpp"

using namespace svcvv;
using Catch::Approx;

namespace reference {

// Straight-line reimplementation of the whole per-frame pipeline in double
// precision with plain 2-D convolutions. Kept independent of the library's
// separable/float code path on purpose.
using Field = std::vector<std::vector<double>>;

Field gray(const ColorImage& img) {
  Field out(img.height, std::vector<double>(img.width));
  for (int i = 0; i < img.height; ++i) {
    for (int j = 0; j < img.width; ++j) {
      out[i][j] = 0.299 * img.at(i, j, 0) + 0.587 * img.at(i, j, 1) + 0.114 * img.at(i, j, 2);
    }
  }
  return out;
}

double sample(const Field& f, int i, int j) {
  i = std::clamp(i, 0, static_cast<int>(f.size()) - 1);
  j = std::clamp(j, 0, static_cast<int>(f[0].size()) - 1);
  return f[i][j];
}

Field blur(const Field& f) {
  double k1[11];
  double sum = 0.0;
  for (int i = 0; i < 11; ++i) {
    const double x = i - 5;
    k1[i] = std::exp(-x * x / (2.0 * 2.15 * 2.15));
    sum += k1[i];
  }
  for (auto& v : k1) v /= sum;
  Field out(f.size(), std::vector<double>(f[0].size()));
  for (int i = 0; i < static_cast<int>(f.size()); ++i) {
    for (int j = 0; j < static_cast<int>(f[0].size()); ++j) {
      double acc = 0.0;
      for (int di = -5; di <= 5; ++di) {
        for (int dj = -5; dj <= 5; ++dj) {
          acc += k1[di + 5] * k1[dj + 5] * sample(f, i + di, j + dj);
        }
      }
      out[i][j] = acc;
    }
  }
  return out;
}

Field normalize(const Field& f) {
  double mn = f[0][0], mx = f[0][0];
  for (const auto& row : f) {
    for (double v : row) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  }
  Field out(f.size(), std::vector<double>(f[0].size(), 0.0));
  if (mx > mn) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = 0; j < f[0].size(); ++j) out[i][j] = (f[i][j] - mn) / (mx - mn);
    }
  }
  return out;
}

double estimate_raw_theta(const ColorImage& img) {
  const Field g = normalize(blur(gray(img)));
  const int h = static_cast<int>(g.size());
  const int w = static_cast<int>(g[0].size());
  const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  Field mag(h, std::vector<double>(w));
  Field ang(h, std::vector<double>(w));
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double gx = 0.0, gy = 0.0;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          gx += kx[di + 1][dj + 1] * sample(g, i + di, j + dj);
          gy += ky[di + 1][dj + 1] * sample(g, i + di, j + dj);
        }
      }
      gy = -gy;
      mag[i][j] = std::sqrt(gx * gx + gy * gy);
      double a = std::atan2(gy, gx) * 180.0 / 3.14159265358979323846;
      if (a < 0.0) a += 360.0;
      if (a >= 360.0) a = 0.0;
      if (a >= 180.0) a -= 180.0;
      ang[i][j] = a;
    }
  }
  mag = normalize(mag);
  for (auto& row : mag) {
    for (double& v : row) {
      if (v < 0.25) v = 0.0;
    }
  }
  Field eroded(h, std::vector<double>(w));
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double m = 1e300;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) m = std::min(m, sample(mag, i + di, j + dj));
      }
      eroded[i][j] = m;
    }
  }
  double hist[180] = {};
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      hist[std::clamp(static_cast<int>(std::floor(ang[i][j])), 0, 179)] += eroded[i][j];
    }
  }
  std::vector<int> offsets(121);
  std::iota(offsets.begin(), offsets.end(), 0);
  std::stable_sort(offsets.begin(), offsets.end(), [&](int a, int b) {
    return hist[a + 30] != hist[b + 30] ? hist[a + 30] > hist[b + 30] : a < b;
  });
  double total = hist[offsets[0] + 30] + hist[offsets[1] + 30] + hist[offsets[2] + 30];
  REQUIRE(total > 0.0);
  double weighted = 0.0;
  for (int k = 0; k < 3; ++k) weighted += offsets[k] * hist[offsets[k] + 30] / total;
  return weighted + 30.0;
}

}  // namespace reference

namespace {

ColorImage black_frame(int h, int w) { return ColorImage(h, w); }

synth::SceneSpec grid_scene(double roll) {
  synth::SceneSpec spec;
  spec.roll_deg = roll;
  spec.seed = 42;
  return spec;
}

}  // namespace

TEST_CASE("weighted_histogram accumulates magnitudes per floor-degree bin") {
  GrayImage ang(1, 3), mag(1, 3);
  ang.data = {45.7f, 90.0f, 90.0f};
  mag.data = {0.8f, 0.5f, 0.25f};
  const auto hist = weighted_histogram(ang, mag);
  CHECK(hist.bins[45] == Approx(0.8));
  CHECK(hist.bins[90] == Approx(0.75));
  double total = 0.0;
  for (double v : hist.bins) total += v;
  CHECK(total == Approx(0.8 + 0.75));

  GrayImage zeros(1, 3, 0.0f);
  for (double v : weighted_histogram(ang, zeros).bins) CHECK(v == 0.0);

  GrayImage wrong(2, 3, 0.0f);
  CHECK_THROWS_AS(weighted_histogram(ang, wrong), std::invalid_argument);
}

TEST_CASE("top3_in_band selection and normalization") {
  AngleHistogram hist;
  hist.bins[30 + 60] = 10.0;
  hist.bins[30 + 10] = 5.0;
  hist.bins[30 + 100] = 5.0;
  const auto top = top3_in_band(hist);
  REQUIRE(top);
  CHECK(top->offsets == std::array<int, 3>{60, 10, 100});
  CHECK(top->weights[0] == Approx(0.5));
  CHECK(top->weights[1] == Approx(0.25));
  CHECK(top->weights[2] == Approx(0.25));
}

TEST_CASE("top3_in_band degenerate and tie cases") {
  AngleHistogram single;
  single.bins[30 + 60] = 4.0;
  const auto top = top3_in_band(single);
  REQUIRE(top);
  CHECK(top->weights == std::array<double, 3>{1.0, 0.0, 0.0});
  double weighted = 0.0;
  for (int k = 0; k < 3; ++k) weighted += top->offsets[k] * top->weights[k];
  CHECK(weighted == Approx(60.0));

  AngleHistogram uniform;
  uniform.bins.fill(2.0);
  const auto tied = top3_in_band(uniform);
  REQUIRE(tied);
  CHECK(tied->offsets == std::array<int, 3>{0, 1, 2});
  CHECK(tied->weights[0] == Approx(1.0 / 3.0));

  AngleHistogram out_of_band_only;
  out_of_band_only.bins[10] = 5.0;
  out_of_band_only.bins[170] = 5.0;
  CHECK_FALSE(top3_in_band(out_of_band_only));
}

TEST_CASE("top3_in_band is invariant to magnitude scaling") {
  AngleHistogram hist;
  for (int d = 0; d < 180; ++d) hist.bins[d] = (d * 37) % 11 + ((d == 95) ? 40 : 0);
  AngleHistogram scaled = hist;
  for (auto& v : scaled.bins) v *= 12.5;
  const auto a = top3_in_band(hist);
  const auto b = top3_in_band(scaled);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->offsets == b->offsets);
  for (int k = 0; k < 3; ++k) CHECK(a->weights[k] == Approx(b->weights[k]));
}

TEST_CASE("smooth_theta follows the 0.7/0.3 update") {
  VvEstimatorState state;
  CHECK(smooth_theta(90.0, state) == Approx(90.0));
  state.theta_prev = 90.0;
  CHECK(smooth_theta(100.0, state) == Approx(97.0));
  state.theta_prev = 150.0;
  CHECK(smooth_theta(30.0, state) == Approx(66.0));
}

TEST_CASE("smoothed theta is a convex combination") {
  VvEstimatorState state;
  state.theta_prev = 120.0;
  const double theta = smooth_theta(40.0, state);
  CHECK(theta > 40.0);
  CHECK(theta < 120.0);
}

TEST_CASE("vv_vector has norm 9.81 and zero z") {
  const Vec3 up = vv_vector(90.0);
  CHECK(up.x == Approx(0.0).margin(1e-12));
  CHECK(up.y == Approx(9.81));
  CHECK(up.z == 0.0);

  const Vec3 v45 = vv_vector(45.0);
  CHECK(v45.x == Approx(9.81 / std::sqrt(2.0)));
  CHECK(v45.y == Approx(9.81 / std::sqrt(2.0)));

  const Vec3 v150 = vv_vector(150.0);
  CHECK(v150.x == Approx(-9.81 * std::sqrt(3.0) / 2.0));
  CHECK(v150.y == Approx(9.81 / 2.0));

  for (double theta : {30.0, 61.3, 97.8, 150.0}) {
    CHECK(vv_vector(theta).norm() == Approx(9.81));
  }
}

TEST_CASE("upright grid converges to 90 degrees") {
  const ColorImage frame = synth::render_scene(grid_scene(0.0));
  VvEstimatorState state;
  VvEstimate est;
  for (int t = 0; t < 10; ++t) est = estimate_frame(frame, state, t);
  CHECK(est.theta_vv == Approx(90.0).margin(1.0));
  CHECK(est.vv.norm() == Approx(9.81));
  CHECK(est.vv.z == 0.0);
}

TEST_CASE("grid rotated by -20 degrees converges near 110") {
  const ColorImage frame = synth::render_scene(grid_scene(-20.0));
  VvEstimatorState state;
  VvEstimate est;
  for (int t = 0; t < 10; ++t) est = estimate_frame(frame, state, t);
  CHECK(est.theta_vv == Approx(110.0).margin(2.0));
}

TEST_CASE("pipeline agrees with the brute-force reference") {
  for (double roll : {0.0, -20.0, 35.0}) {
    const ColorImage frame = synth::render_scene(grid_scene(roll));
    const FrameAngle got = analyze_frame(frame);
    REQUIRE(got.has_edges);
    CHECK(got.raw_theta == Approx(reference::estimate_raw_theta(frame)).margin(0.5));
  }
}

TEST_CASE("featureless frame holds the previous estimate") {
  VvEstimatorState state;
  state.theta_prev = 95.0;
  const VvEstimate est = estimate_frame(black_frame(36, 64), state);
  CHECK(est.theta_vv == 95.0);
  CHECK(state.theta_prev == 95.0);
}

TEST_CASE("identical frames converge geometrically to the raw angle") {
  const ColorImage frame = synth::render_scene(grid_scene(-20.0));
  const FrameAngle raw = analyze_frame(frame);
  REQUIRE(raw.has_edges);
  VvEstimatorState state;
  double err = std::abs(90.0 - raw.raw_theta);
  for (int t = 1; t <= 8; ++t) {
    const double theta = update_theta(raw, state);
    const double e = std::abs(theta - raw.raw_theta);
    CHECK(e <= 0.3 * err + 1e-12);
    err = e;
  }
}

TEST_CASE("estimate sequences are deterministic") {
  std::vector<ColorImage> frames;
  for (int k = 0; k < 5; ++k) {
    auto spec = grid_scene(-10.0 + 4.0 * k);
    spec.seed = 100 + static_cast<std::uint64_t>(k);
    frames.push_back(synth::render_scene(spec));
  }
  std::vector<double> run1, run2;
  for (auto* out : {&run1, &run2}) {
    VvEstimatorState state;
    for (const auto& f : frames) out->push_back(estimate_frame(f, state).theta_vv);
  }
  CHECK(run1 == run2);

  for (double theta : run1) {
    CHECK(theta >= 30.0);
    CHECK(theta <= 150.0);
  }
}
