#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "revgeo/errors.hpp"

namespace revgeo {

/// Value and first two derivatives of a scalar function at one point.
struct Jet
{
  double f = 0.0;
  double df = 0.0;
  double ddf = 0.0;
};

/// C2 interpolating cubic spline with not-a-knot end conditions.
///
/// Knots must be strictly increasing and there must be at least four of
/// them (three intervals), otherwise the not-a-knot conditions at both ends
/// over-determine the cubic.
class CubicSpline
{
public:
  CubicSpline() = default;

  CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end())
    , y_(y.begin(), y.end())
  {
    if (x_.size() != y_.size())
      throw ConfigError("spline: knot and value counts differ");
    if (x_.size() < 4)
      throw ConfigError("spline: need at least 4 knots");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1]))
        throw ConfigError("spline: knots must be strictly increasing");
    solve_second_derivatives();
  }

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }

  /// Evaluates the spline; outside the knot range the end cubic is extended.
  Jet operator()(double t) const
  {
    const std::size_t n = x_.size() - 1;
    std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
    i = std::clamp<std::size_t>(i, 1, n) - 1;

    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    const double m0 = m_[i];
    const double m1 = m_[i + 1];

    Jet out;
    out.f = a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
    out.df = (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
    out.ddf = a * m0 + b * m1;
    return out;
  }

private:
  // Second derivatives at the knots. The end values are eliminated with the
  // not-a-knot relations, leaving a tridiagonal system for the interior.
  void solve_second_derivatives()
  {
    const std::size_t n = x_.size() - 1; // intervals
    std::vector<double> h(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      d[i] = (y_[i + 1] - y_[i]) / h[i];
    }

    const std::size_t m = n - 1; // interior unknowns M_1..M_{n-1}
    std::vector<double> lo(m, 0.0), di(m, 0.0), up(m, 0.0), rhs(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t i = r + 1;
      lo[r] = h[i - 1];
      di[r] = 2.0 * (h[i - 1] + h[i]);
      up[r] = h[i];
      rhs[r] = 6.0 * (d[i] - d[i - 1]);
    }

    // M_0 = ((h0 + h1) M_1 - h0 M_2) / h1
    di[0] += h[0] * (h[0] + h[1]) / h[1];
    up[0] -= h[0] * h[0] / h[1];
    // M_n = ((h_{n-2} + h_{n-1}) M_{n-1} - h_{n-1} M_{n-2}) / h_{n-2}
    {
      const double ha = h[n - 2];
      const double hb = h[n - 1];
      di[m - 1] += hb * (ha + hb) / ha;
      lo[m - 1] -= hb * hb / ha;
    }

    for (std::size_t r = 1; r < m; ++r) {
      const double w = lo[r] / di[r - 1];
      di[r] -= w * up[r - 1];
      rhs[r] -= w * rhs[r - 1];
    }
    rhs[m - 1] /= di[m - 1];
    for (std::size_t r = m - 1; r-- > 0;)
      rhs[r] = (rhs[r] - up[r] * rhs[r + 1]) / di[r];

    m_.assign(n + 1, 0.0);
    for (std::size_t r = 0; r < m; ++r)
      m_[r + 1] = rhs[r];
    m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
    m_[n] = ((h[n - 2] + h[n - 1]) * m_[n - 1] - h[n - 1] * m_[n - 2]) / h[n - 2];
  }

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

} // namespace revgeo
