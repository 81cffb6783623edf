// Randomized metric properties of distance() over the surface catalogue.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "revgeo/connect.hpp"

using namespace revgeo;

namespace {

struct Region
{
  ProfileSurface S;
  double u_lo, u_hi;
  double v_span;
};

std::vector<Region> regions()
{
  return {{surfaces::sphere(1.0), 0.5, pi - 0.5, 2.0},     {surfaces::cylinder(1.0), -1.0, 1.0, 2.5},
          {surfaces::cone(0.7), 0.8, 2.0, 1.5},            {surfaces::paraboloid(0.5), 0.6, 1.6, 1.2},
          {surfaces::catenoid(1.0), -0.8, 0.8, 1.5},       {surfaces::torus(2.0, 0.5), -0.8, 0.8, 0.8},
          {surfaces::plane(), 1.0, 2.0, 1.0},              {surfaces::sphere(2.0), 0.5, pi - 0.5, 1.5}};
}

SurfacePoint sample(const Region& r, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> U(0.0, 1.0);
  return {r.u_lo + (r.u_hi - r.u_lo) * U(rng), r.v_span * (U(rng) - 0.5)};
}

} // namespace

TEST(ConnectProperties, SymmetryAndChordBound)
{
  std::mt19937_64 rng(31337);
  for (const auto& r : regions()) {
    for (int k = 0; k < 100; ++k) {
      const SurfacePoint A = sample(r, rng), B = sample(r, rng);
      const auto ab = connect_geodesic(r.S, A, B);
      const auto ba = connect_geodesic(r.S, B, A);
      const double s = ab.length();
      EXPECT_NEAR(s, ba.length(), 1e-9 * std::max(1.0, s)) << r.S.kind();
      EXPECT_GE(s, distance3(r.S.embed(A), r.S.embed(B)) - 1e-9 * std::max(1.0, s)) << r.S.kind();
    }
  }
}

TEST(ConnectProperties, TriangleInequality)
{
  std::mt19937_64 rng(4242);
  const auto all = regions();
  for (const Region* r : {&all[0], &all[3]}) {
    for (int k = 0; k < 100; ++k) {
      const SurfacePoint A = sample(*r, rng), B = sample(*r, rng), C = sample(*r, rng);
      const double ab = distance(r->S, A, B), bc = distance(r->S, B, C), ac = distance(r->S, A, C);
      EXPECT_LE(ac, ab + bc + 1e-8) << r->S.kind();
      EXPECT_LE(ab, ac + bc + 1e-8) << r->S.kind();
      EXPECT_LE(bc, ab + ac + 1e-8) << r->S.kind();
    }
  }
}
