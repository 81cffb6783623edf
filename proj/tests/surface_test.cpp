#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "revgeo/surface.hpp"

using namespace revgeo;

namespace {

std::vector<ProfileSurface> catalogue()
{
  return {surfaces::sphere(1.0), surfaces::sphere(2.5), surfaces::cylinder(2.0), surfaces::cone(0.7),
          surfaces::paraboloid(0.5), surfaces::catenoid(1.0), surfaces::torus(2.0, 0.5), surfaces::plane()};
}

ProfileSurface cosh_custom(int n, double lo = -1.0, double hi = 1.0)
{
  std::vector<ProfileSample> samples;
  for (int i = 0; i <= n; ++i) {
    const double u = lo + (hi - lo) * i / n;
    samples.push_back({u, std::cosh(u), u});
  }
  return surfaces::custom(samples);
}

} // namespace

TEST(Surface, SphereEmbedding)
{
  const auto S = surfaces::sphere(1.0);
  const Vec3 a = S.embed({pi / 2, 0.0});
  EXPECT_NEAR(a[0], 1.0, 1e-15);
  EXPECT_NEAR(a[1], 0.0, 1e-15);
  EXPECT_NEAR(a[2], 0.0, 1e-15);
  const Vec3 b = S.embed({pi / 2, pi / 2});
  EXPECT_NEAR(b[0], 0.0, 1e-15);
  EXPECT_NEAR(b[1], 1.0, 1e-15);
  EXPECT_NEAR(b[2], 0.0, 1e-15);
}

TEST(Surface, CatenoidEmbedding)
{
  const Vec3 p = surfaces::catenoid(1.0).embed({1.0, 0.0});
  EXPECT_DOUBLE_EQ(p[0], std::cosh(1.0));
  EXPECT_DOUBLE_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], 1.0);
}

TEST(Surface, MetricExamples)
{
  const Metric sphere = surfaces::sphere(1.0).metric_at(pi / 2);
  EXPECT_NEAR(sphere.E, 1.0, 1e-15);
  EXPECT_NEAR(sphere.G, 1.0, 1e-15);
  EXPECT_NEAR(sphere.rho, 1.0, 1e-15);

  const Metric cyl = surfaces::cylinder(2.0).metric_at(0.3);
  EXPECT_DOUBLE_EQ(cyl.E, 1.0);
  EXPECT_DOUBLE_EQ(cyl.G, 4.0);
  EXPECT_DOUBLE_EQ(cyl.G_u, 0.0);

  // phi = u, psi = u^2 / 2
  const Metric par = surfaces::paraboloid(0.5).metric_at(1.0);
  EXPECT_DOUBLE_EQ(par.E, 2.0);
  EXPECT_DOUBLE_EQ(par.G, 1.0);
}

TEST(Surface, MetricDerivativesMatchFiniteDifferences)
{
  for (const auto& S : catalogue()) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      const double u = S.u_min() + (S.u_max() - S.u_min()) * (0.05 + 0.9 * U(rng));
      if (!S.on_chart(u))
        continue;
      const double h = 1e-5;
      const Metric m = S.metric_at(u);
      const Metric mp = S.metric_unchecked(u + h);
      const Metric mm = S.metric_unchecked(u - h);
      const double scale = 1.0 + std::abs(m.E_u) + std::abs(m.G_u);
      EXPECT_NEAR(m.E_u, (mp.E - mm.E) / (2 * h), 1e-5 * scale) << S.kind() << " u=" << u;
      EXPECT_NEAR(m.G_u, (mp.G - mm.G) / (2 * h), 1e-5 * scale) << S.kind() << " u=" << u;
    }
  }
}

TEST(Surface, CatalogueMetricIsRegular)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& S : catalogue()) {
    int checked = 0;
    while (checked < 1000) {
      const double u = S.u_min() + (S.u_max() - S.u_min()) * U(rng);
      const double v = -10.0 + 20.0 * U(rng);
      if (!S.on_chart(SurfacePoint{u, v}))
        continue;
      const Metric m = S.metric_at(u);
      ASSERT_TRUE(std::isfinite(m.E) && std::isfinite(m.G)) << S.kind();
      ASSERT_GT(m.E, 0.0) << S.kind();
      ASSERT_GT(m.G, 0.0) << S.kind();
      ASSERT_NEAR(m.rho, std::sqrt(m.G), 1e-12 * std::max(1.0, m.rho)) << S.kind();
      ++checked;
    }
  }
}

TEST(Surface, HeadingRoundTrip)
{
  const auto S = surfaces::paraboloid(0.5);
  const SurfacePoint p{1.0, 0.3};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-pi, pi);
  for (int k = 0; k < 1000; ++k) {
    const double theta = U(rng);
    const Heading h = heading_from_tangent(S, tangent_from_heading(S, p, theta));
    EXPECT_NEAR(h.theta, theta, 1e-12);
  }
  EXPECT_DOUBLE_EQ(heading_from_tangent(S, tangent_from_heading(S, p, pi)).theta, pi);
}

TEST(Surface, HeadingExamples)
{
  const auto S = surfaces::sphere(1.0);
  const SurfacePoint p{pi / 2, 0.0};

  auto t0 = tangent_from_heading(S, p, 0.0);
  EXPECT_DOUBLE_EQ(t0.a_par, 1.0);
  EXPECT_DOUBLE_EQ(t0.a_mer, 0.0);
  auto t1 = tangent_from_heading(S, p, pi / 2);
  EXPECT_NEAR(t1.a_par, 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(t1.a_mer, 1.0);
  auto t2 = tangent_from_heading(S, p, pi / 4);
  EXPECT_NEAR(t2.a_par, std::sqrt(2.0) / 2, 2e-16);
  EXPECT_NEAR(t2.a_mer, std::sqrt(2.0) / 2, 2e-16);

  Heading h = heading_from_tangent(TangentVector{p, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(h.theta, 0.0);
  EXPECT_DOUBLE_EQ(h.alpha, 0.0);
  EXPECT_DOUBLE_EQ(h.beta, pi / 2);

  h = heading_from_tangent(TangentVector{p, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(h.theta, pi / 2);
  EXPECT_DOUBLE_EQ(h.beta, 0.0);

  h = heading_from_tangent(TangentVector{p, -std::sqrt(2.0) / 2, std::sqrt(2.0) / 2});
  EXPECT_NEAR(h.theta, 3 * pi / 4, 1e-15);
  EXPECT_NEAR(std::abs(std::cos(h.alpha)), std::abs(std::sin(h.beta)), 1e-15);

  EXPECT_THROW(heading_from_tangent(TangentVector{p, 0.0, 0.0}), DomainError);
}

TEST(Surface, ChartChecks)
{
  const auto S = surfaces::sphere(1.0);
  EXPECT_THROW(S.embed({0.0, 0.0}), ChartError);        // pole
  EXPECT_THROW(S.embed({1e-8, 0.0}), ChartError);       // inside the axis guard
  EXPECT_THROW(S.embed({4.0, 0.0}), ChartError);        // past u_max
  EXPECT_THROW(S.metric_at(-0.5), ChartError);
  EXPECT_NO_THROW(S.embed({1e-3, 0.0}));
  EXPECT_TRUE(S.on_chart(SurfacePoint{pi / 2, 123.0})); // v is unbounded
}

TEST(Surface, MakeSurfaceErrors)
{
  EXPECT_THROW(make_surface({"cylinder", {{"R", 0.0}}, {}, {}, {}, {}}), ConfigError);
  EXPECT_THROW(make_surface({"klein_bottle", {}, {}, {}, {}, {}}), ConfigError);
  EXPECT_THROW(make_surface({"torus", {{"R", 1.0}, {"r", 2.0}}, {}, {}, {}, {}}), ConfigError);
  EXPECT_THROW(make_surface({"paraboloid", {}, {}, {}, {}, {}}), ConfigError);

  ProfileSpec bad_order{"custom", {}, {{0.0, 1.0, 0.0}, {1.0, 1.0, 1.0}, {0.5, 1.0, 2.0}, {2.0, 1.0, 3.0}}, {}, {}, {}};
  EXPECT_THROW(make_surface(bad_order), ConfigError);
  ProfileSpec bad_phi{"custom", {}, {{0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 2.0}, {3.0, 1.0, 3.0}}, {}, {}, {}};
  EXPECT_THROW(make_surface(bad_phi), ConfigError);
  ProfileSpec too_few{"custom", {}, {{0.0, 1.0, 0.0}, {1.0, 1.0, 1.0}, {2.0, 1.0, 2.0}}, {}, {}, {}};
  EXPECT_THROW(make_surface(too_few), ConfigError);
}

TEST(Surface, MakeSurfaceOverrides)
{
  const auto S = make_surface({"sphere", {{"R", 2.0}}, {}, 0.5, 2.0, 1e-4});
  EXPECT_EQ(S.kind(), "sphere");
  EXPECT_DOUBLE_EQ(S.u_min(), 0.5);
  EXPECT_DOUBLE_EQ(S.u_max(), 2.0);
  EXPECT_DOUBLE_EQ(S.axis_guard(), 1e-4);
  EXPECT_NEAR(S.metric_at(1.0).rho, 2.0 * std::sin(1.0), 1e-15);
}

// Oracle: the analytic catenoid, against a spline through cosh samples.
TEST(Surface, CustomCoshMatchesCatenoid)
{
  const auto custom = cosh_custom(200);
  const auto cat = surfaces::catenoid(1.0);
  for (int k = 0; k < 100; ++k) {
    const double u = -0.99 + 1.98 * k / 99.0;
    const Metric a = custom.metric_at(u);
    const Metric b = cat.metric_at(u);
    EXPECT_NEAR(a.E, b.E, 1e-6);
    EXPECT_NEAR(a.G, b.G, 1e-6);
  }
}

TEST(Surface, DenseCustomSplineReproducesMetricDerivatives)
{
  const int n = 2000;
  const auto custom = cosh_custom(n);
  const auto cat = surfaces::catenoid(1.0);
  double worst = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double u = -1.0 + 2.0 * (i + 0.5) / n;
    const Metric a = custom.metric_at(u);
    const Metric b = cat.metric_at(u);
    worst = std::max({worst, std::abs(a.E - b.E), std::abs(a.G - b.G), std::abs(a.E_u - b.E_u),
                      std::abs(a.G_u - b.G_u)});
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Surface, WrapAngle)
{
  EXPECT_DOUBLE_EQ(wrap_angle(pi), pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-pi), pi);
  EXPECT_NEAR(wrap_angle(3 * pi / 2), -pi / 2, 1e-15);
  EXPECT_NEAR(wrap_positive(-pi / 2), 3 * pi / 2, 1e-15);
}
