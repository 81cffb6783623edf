#pragma once

// Closed-form and independent reference computations used by the tests.
// Nothing here calls the connect or Fermat solvers.

#include <array>
#include <cmath>
#include <random>

#include "revgeo/geodesic.hpp"
#include "revgeo/surface.hpp"

namespace oracle {

using revgeo::Vec3;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Great-circle distance between two points of a sphere centred at 0.
inline double great_circle(const Vec3& a, const Vec3& b)
{
  const double R = std::sqrt(dot(a, a));
  return R * std::acos(std::clamp(dot(a, b) / (R * std::sqrt(dot(b, b))), -1.0, 1.0));
}

/// Weighted geometric median of three points in R^3 by Weiszfeld iteration.
inline Vec3 weiszfeld(const std::array<Vec3, 3>& p, const std::array<double, 3>& b, int iters = 200000)
{
  Vec3 x{};
  double bs = b[0] + b[1] + b[2];
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      x[k] += b[i] * p[i][k] / bs;
  for (int it = 0; it < iters; ++it) {
    Vec3 num{};
    double den = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = revgeo::distance3(x, p[i]);
      if (d == 0.0)
        return x;
      for (int k = 0; k < 3; ++k)
        num[k] += b[i] * p[i][k] / d;
      den += b[i] / d;
    }
    const Vec3 nx{num[0] / den, num[1] / den, num[2] / den};
    const double step = revgeo::distance3(nx, x);
    x = nx;
    if (step < 1e-15)
      break;
  }
  return x;
}

/// Chart point of the plane (u = radius, v = polar angle) for (x, y).
inline revgeo::SurfacePoint plane_point(double x, double y) { return {std::hypot(x, y), std::atan2(y, x)}; }

/// Angles of a balanced tree from the weight triangle: the law of cosines
/// gives the triangle angle opposite b_k; the sector is its supplement.
inline std::array<double, 3> sector_angles(const std::array<double, 3>& b)
{
  std::array<double, 3> out{};
  for (int p = 0; p < 3; ++p) {
    const int i = p, j = (p + 1) % 3, k = (p + 2) % 3;
    out[p] = std::acos((b[k] * b[k] - b[i] * b[i] - b[j] * b[j]) / (2.0 * b[i] * b[j]));
  }
  return out;
}

/// Weights in [lo, hi] satisfying the strict triangle inequalities with a
/// margin, so the balanced tree is not nearly degenerate.
inline std::array<double, 3> random_weights(std::mt19937_64& rng, double lo = 0.5, double hi = 2.0,
                                            double margin = 0.9)
{
  std::uniform_real_distribution<double> U(lo, hi);
  for (;;) {
    std::array<double, 3> b{U(rng), U(rng), U(rng)};
    bool ok = true;
    for (int i = 0; i < 3; ++i)
      ok = ok && b[i] < margin * (b[(i + 1) % 3] + b[(i + 2) % 3]);
    if (ok)
      return b;
  }
}

struct Planted
{
  std::array<revgeo::SurfacePoint, 3> pts;
  std::array<double, 3> headings;
};

/// Shoots three branches from A0 so that their sectors are the balanced
/// angles of b. A0 then satisfies the first-order condition exactly.
inline Planted plant(const revgeo::ProfileSurface& S, const revgeo::SurfacePoint& A0, const std::array<double, 3>& b,
                     double theta0, const std::array<double, 3>& lengths)
{
  const auto phi = sector_angles(b);
  Planted out;
  out.headings = {theta0, theta0 + phi[0], theta0 + phi[0] + phi[1]};
  for (int i = 0; i < 3; ++i)
    out.pts[i] = revgeo::shoot(S, A0, out.headings[i], lengths[i]).end();
  return out;
}

} // namespace oracle
