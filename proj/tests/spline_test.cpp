#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "revgeo/spline.hpp"

using revgeo::CubicSpline;

// Not-a-knot splines reproduce any cubic exactly, including on uneven knots.
TEST(CubicSpline, ReproducesCubicPolynomial)
{
  auto p = [](double x) { return 0.5 * x * x * x - 2.0 * x * x + x - 3.0; };
  auto dp = [](double x) { return 1.5 * x * x - 4.0 * x + 1.0; };
  auto ddp = [](double x) { return 3.0 * x - 4.0; };

  std::vector<double> x{-1.0, -0.3, 0.2, 0.9, 1.1, 2.5};
  std::vector<double> y;
  for (double xi : x)
    y.push_back(p(xi));
  CubicSpline s(x, y);

  for (double t = -1.0; t <= 2.5; t += 0.037) {
    const auto j = s(t);
    EXPECT_NEAR(j.f, p(t), 1e-12);
    EXPECT_NEAR(j.df, dp(t), 1e-11);
    EXPECT_NEAR(j.ddf, ddp(t), 1e-10);
  }
}

TEST(CubicSpline, FourKnotsIsTheInterpolatingCubic)
{
  std::vector<double> x{0.0, 1.0, 2.0, 4.0};
  std::vector<double> y{1.0, 2.0, 9.0, 65.0}; // 1 + x^3
  CubicSpline s(x, y);
  EXPECT_NEAR(s(3.0).f, 28.0, 1e-12);
  EXPECT_NEAR(s(3.0).ddf, 18.0, 1e-11);
}

TEST(CubicSpline, ConvergesOnSmoothFunction)
{
  std::vector<double> x, y;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    x.push_back(-1.0 + 2.0 * i / n);
    y.push_back(std::cosh(x.back()));
  }
  CubicSpline s(x, y);
  double worst_f = 0.0, worst_dd = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (x[i] + x[i + 1]);
    worst_f = std::max(worst_f, std::abs(s(t).f - std::cosh(t)));
    worst_dd = std::max(worst_dd, std::abs(s(t).ddf - std::cosh(t)));
  }
  EXPECT_LT(worst_f, 1e-10);
  EXPECT_LT(worst_dd, 1e-4);
}

TEST(CubicSpline, RejectsBadKnots)
{
  std::vector<double> three{0.0, 1.0, 2.0};
  EXPECT_THROW(CubicSpline(three, three), revgeo::ConfigError);

  std::vector<double> unsorted{0.0, 2.0, 1.0, 3.0};
  std::vector<double> y{0.0, 0.0, 0.0, 0.0};
  EXPECT_THROW(CubicSpline(unsorted, y), revgeo::ConfigError);

  std::vector<double> repeated{0.0, 1.0, 1.0, 3.0};
  EXPECT_THROW(CubicSpline(repeated, y), revgeo::ConfigError);
}
