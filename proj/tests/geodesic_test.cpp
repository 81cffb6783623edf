#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "revgeo/geodesic.hpp"

using namespace revgeo;

TEST(GeodesicDerivative, MeridiansStayMeridians)
{
  const auto S = surfaces::paraboloid(0.5);
  const GeodesicState y{1.3, 0.2, 1.0 / std::sqrt(S.metric_at(1.3).E), 0.0};
  EXPECT_EQ(geodesic_derivative(S, y).ddv, 0.0);
}

TEST(GeodesicDerivative, CatenoidWaistParallel)
{
  const auto S = surfaces::catenoid(1.0);
  const GeodesicState y{0.0, 0.0, 0.0, 1.0};
  const auto d = geodesic_derivative(S, y);
  EXPECT_EQ(d.ddu, 0.0);
  EXPECT_EQ(d.ddv, 0.0);
}

TEST(GeodesicDerivative, SphereEquator)
{
  const auto S = surfaces::sphere(1.0);
  const auto d = geodesic_derivative(S, GeodesicState{pi / 2, 0.0, 0.0, 1.0});
  EXPECT_NEAR(d.ddu, 0.0, 1e-15);
  EXPECT_NEAR(d.ddv, 0.0, 1e-15);
  EXPECT_THROW(geodesic_derivative(S, GeodesicState{-0.1, 0.0, 1.0, 0.0}), ChartError);
}

TEST(Shoot, EquatorHalfTurn)
{
  const auto S = surfaces::sphere(1.0);
  const auto path = shoot(S, {pi / 2, 0.0}, 0.0, pi);
  EXPECT_NEAR(path.end().u, pi / 2, 1e-12);
  EXPECT_NEAR(path.end().v, pi, 1e-9);
  EXPECT_DOUBLE_EQ(path.c_nominal, 1.0);
  EXPECT_LE(path.c_drift, 1e-12);
}

// Under the frame convention theta = +pi/2 increases the colatitude.
TEST(Shoot, MeridianSouthAndNorth)
{
  const auto S = surfaces::sphere(1.0);
  const auto south = shoot(S, {pi / 2, 0.0}, pi / 2, pi / 4);
  EXPECT_TRUE(south.meridian);
  EXPECT_NEAR(south.end().u, 3 * pi / 4, 1e-10);
  EXPECT_EQ(south.end().v, 0.0);
  EXPECT_EQ(south.c_nominal, 0.0);

  const auto north = shoot(S, {pi / 2, 0.0}, -pi / 2, pi / 4);
  EXPECT_NEAR(north.end().u, pi / 4, 1e-10);
  EXPECT_EQ(north.end().v, 0.0);
}

// Oracle: the great circle through (1,0,0) with the launch tangent
// cos(theta) e_par + sin(theta) e_mer = (0, cos theta, -sin theta).
TEST(Shoot, GreatCircleClosedForm)
{
  const auto S = surfaces::sphere(1.0);
  const double theta = pi / 4;
  const auto path = shoot(S, {pi / 2, 0.0}, theta, 1.0);
  const Vec3 got = S.embed(path.end());
  const Vec3 want{std::cos(1.0), std::sin(1.0) * std::cos(theta), -std::sin(1.0) * std::sin(theta)};
  EXPECT_LT(distance3(got, want), 1e-8);
}

TEST(Shoot, PoleCrossingMeridian)
{
  const auto S = surfaces::sphere(1.0);
  const auto path = shoot(S, {pi / 4, 0.0}, -pi / 2, pi / 2);
  EXPECT_NEAR(path.end().u, pi / 4, 1e-9);
  EXPECT_NEAR(path.end().v, pi, 1e-15);
  const Vec3 e = S.embed(path.end());
  EXPECT_NEAR(e[0], -std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(e[2], std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(path.theta_end, pi / 2, 1e-15);
}

TEST(Shoot, ChartExitReportsArcLength)
{
  const auto cyl = surfaces::cylinder(1.0); // u in [-10, 10]
  try {
    shoot(cyl, {0.0, 0.0}, pi / 2, 15.0);
    FAIL() << "expected chart exit";
  } catch (const ChartExit& e) {
    EXPECT_NEAR(e.exit_s, 10.0, 1e-9);
  }
  try {
    shoot(cyl, {0.0, 0.0}, pi / 4, 20.0);
    FAIL() << "expected chart exit";
  } catch (const ChartExit& e) {
    EXPECT_NEAR(e.exit_s, 10.0 * std::sqrt(2.0), 1e-9);
  }
  // Catenoid ends are not an axis: meridians cannot continue there.
  EXPECT_THROW(shoot(surfaces::catenoid(1.0), {4.0, 0.0}, pi / 2, 60.0), ChartExit);
}

TEST(Shoot, RejectsBadArguments)
{
  const auto S = surfaces::sphere(1.0);
  EXPECT_THROW(shoot(S, {pi / 2, 0.0}, 0.0, -1.0), ConfigError);
  EXPECT_THROW(shoot(S, {pi / 2, 0.0}, 0.0, 1.0, {0.0}), ConfigError);
  EXPECT_THROW(shoot(S, {0.0, 0.0}, 0.0, 1.0), ChartError);
  EXPECT_EQ(shoot(S, {pi / 2, 0.0}, 0.3, 0.0).samples.size(), 1u);
}

TEST(ClairautConstant, Examples)
{
  const auto sphere = surfaces::sphere(1.0);
  EXPECT_DOUBLE_EQ(clairaut_constant(sphere, {pi / 2, 0.0}, 0.0), 1.0);
  EXPECT_NEAR(clairaut_constant(sphere, {1.0, 0.0}, pi / 2), 0.0, 1e-16);
  EXPECT_NEAR(clairaut_constant(sphere, {1.0, 0.0}, -pi / 2), 0.0, 1e-16);
  EXPECT_NEAR(clairaut_constant(surfaces::catenoid(1.0), {1.0, 0.0}, pi / 3), std::cosh(1.0) / 2, 1e-15);
  EXPECT_NEAR(std::cosh(1.0) / 2, 0.7715, 1e-4);
}

namespace {

struct Case
{
  ProfileSurface S;
  double u_lo, u_hi;
};

} // namespace

TEST(Shoot, ConservationReversibilityAndChordBound)
{
  std::vector<Case> cases{{surfaces::sphere(1.0), 0.6, pi - 0.6},
                          {surfaces::paraboloid(0.5), 0.5, 2.0},
                          {surfaces::catenoid(1.0), -1.5, 1.5},
                          {surfaces::torus(2.0, 0.5), -1.0, 1.0}};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& c : cases) {
    for (int k = 0; k < 40; ++k) {
      const SurfacePoint p{c.u_lo + (c.u_hi - c.u_lo) * U(rng), -pi + 2 * pi * U(rng)};
      const double theta = -pi + 2 * pi * U(rng);
      const double L = 0.1 + 1.4 * U(rng);
      GeodesicPath path;
      try {
        path = shoot(c.S, p, theta, L);
      } catch (const ChartExit&) {
        continue;
      }
      ASSERT_DOUBLE_EQ(path.samples.back().s, L);
      for (std::size_t i = 1; i < path.samples.size(); ++i)
        ASSERT_GT(path.samples[i].s, path.samples[i - 1].s);

      double rho_max = 1.0;
      for (const auto& smp : path.samples) {
        const double rho = c.S.jet(smp.state.u).phi.f;
        rho_max = std::max(rho_max, rho);
        // cosine and sine forms of the first integral agree sample by sample
        const double th = heading_of(c.S, smp.state);
        EXPECT_NEAR(rho * std::cos(th), rho * std::sin(pi / 2 - th), 1e-12 * std::max(1.0, rho));
      }
      EXPECT_LE(path.c_drift, 1e-8 * rho_max) << c.S.kind();
      EXPECT_LE(path.speed_drift, 1e-8) << c.S.kind();
      EXPECT_LE(path.c_drift, path.drift_bound);

      const auto back = shoot(c.S, path.end(), path.theta_end + pi, L);
      const double du = back.end().u - p.u;
      const double dv = back.end().v - p.v;
      EXPECT_LT(std::hypot(du, dv), 1e-7 * L) << c.S.kind();

      EXPECT_LE(distance3(c.S.embed(p), c.S.embed(path.end())), L + 1e-12);
    }
  }
}

TEST(Shoot, ReversedPath)
{
  const auto S = surfaces::paraboloid(0.5);
  const auto path = shoot(S, {1.0, 0.0}, 0.7, 0.8);
  const auto r = reversed(path);
  EXPECT_EQ(r.samples.front().s, 0.0);
  EXPECT_EQ(r.samples.back().s, path.length);
  EXPECT_EQ(r.start().u, path.end().u);
  EXPECT_NEAR(r.theta_start, wrap_angle(path.theta_end + pi), 1e-15);
  EXPECT_NEAR(r.c_nominal, -path.c_nominal, 0.0);
}
