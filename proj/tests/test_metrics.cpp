#include <catch2/catch_amalgamated.hpp>

#include "svcvv/metrics.hpp"

using namespace svcvv::metrics;
using Catch::Approx;

TEST_CASE("linear regression recovers exact lines") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double xi : x) y.push_back(2.0 * xi + 1.0);
  const auto r = linear_regression(x, y);
  CHECK(r.slope == Approx(2.0));
  CHECK(r.intercept == Approx(1.0));
  CHECK(r.r_squared == Approx(1.0).margin(1e-12));
}

TEST_CASE("linear regression degenerate cases") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y_const{5, 5, 5, 5};
  const auto r = linear_regression(x, y_const);
  CHECK(r.slope == Approx(0.0));
  CHECK(r.r_squared == 1.0);  // SS_tot = SS_res = 0

  CHECK_THROWS_AS(linear_regression({1, 1, 1}, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(linear_regression({1}, {2}), std::invalid_argument);
  CHECK_THROWS_AS(linear_regression({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("linear regression with noise keeps r_squared in [0, 1]") {
  const std::vector<double> x{0, 1, 2, 3, 4, 5};
  const std::vector<double> y{0.2, 1.1, 1.8, 3.3, 3.9, 5.1};
  const auto r = linear_regression(x, y);
  CHECK(r.r_squared >= 0.0);
  CHECK(r.r_squared <= 1.0);
  CHECK(r.slope == Approx(1.0).margin(0.1));
}

TEST_CASE("mean absolute deviation") {
  CHECK(mad({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(mad({0, 10}, {2, 6}) == Approx(3.0));
  CHECK_THROWS_AS(mad({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(mad({1}, {1, 2}), std::invalid_argument);

  // symmetry and translation invariance
  const std::vector<double> a{4.5, -2.0, 7.75};
  const std::vector<double> b{1.0, 0.5, 9.0};
  CHECK(mad(a, b) == Approx(mad(b, a)));
  std::vector<double> a_shift, b_shift;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a_shift.push_back(a[i] + 11.0);
    b_shift.push_back(b[i] + 11.0);
  }
  CHECK(mad(a_shift, b_shift) == Approx(mad(a, b)));
}

TEST_CASE("population standard deviation") {
  CHECK(std_dev({3, 3, 3, 3}) == 0.0);
  CHECK(std_dev({0, 2}) == Approx(1.0));
  CHECK(std_dev({1, 2, 3, 4}) == Approx(std::sqrt(1.25)));
  CHECK_THROWS_AS(std_dev({1}), std::invalid_argument);
}
