#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

// Evaluation statistics: ordinary least squares, mean absolute deviation,
// population standard deviation.
namespace svcvv::metrics {

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline RegressionResult linear_regression(const std::vector<double>& x,
                                          const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_regression: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("linear_regression: need at least 2 points");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_regression: x is constant");

  RegressionResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (r.slope * x[i] + r.intercept);
    ss_res += e * e;
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  // Constant y fitted exactly: define R^2 = 1.
  r.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return r;
}

inline double mad(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("mad: size mismatch");
  if (x.empty()) throw std::invalid_argument("mad: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

inline double std_dev(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("std_dev: need at least 2 samples");
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));  // population divisor
}

}  // namespace svcvv::metrics
