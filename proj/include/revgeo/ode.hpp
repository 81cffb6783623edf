#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>

namespace revgeo::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct StepResult
{
  Vec<N> y;     // fifth-order solution (propagated)
  Vec<N> err;   // difference to the embedded fourth-order solution
  Vec<N> dy_end; // f(y), reusable as the first stage of the next step
};

/// One Dormand-Prince 5(4) step of y' = f(y) (autonomous). dy0 = f(y0).
template <std::size_t N, class F>
StepResult<N> dopri5_step(const F& f, const Vec<N>& y, const Vec<N>& dy0, double h)
{
  static constexpr double c21 = 1.0 / 5.0;
  static constexpr double c31 = 3.0 / 40.0, c32 = 9.0 / 40.0;
  static constexpr double c41 = 44.0 / 45.0, c42 = -56.0 / 15.0, c43 = 32.0 / 9.0;
  static constexpr double c51 = 19372.0 / 6561.0, c52 = -25360.0 / 2187.0, c53 = 64448.0 / 6561.0,
                          c54 = -212.0 / 729.0;
  static constexpr double c61 = 9017.0 / 3168.0, c62 = -355.0 / 33.0, c63 = 46732.0 / 5247.0,
                          c64 = 49.0 / 176.0, c65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                          b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  auto axpy = [&](std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [c, k] : terms)
      for (std::size_t i = 0; i < N; ++i)
        out[i] += h * c * (*k)[i];
    return out;
  };

  const Vec<N>& k1 = dy0;
  const Vec<N> k2 = f(axpy({{c21, &k1}}));
  const Vec<N> k3 = f(axpy({{c31, &k1}, {c32, &k2}}));
  const Vec<N> k4 = f(axpy({{c41, &k1}, {c42, &k2}, {c43, &k3}}));
  const Vec<N> k5 = f(axpy({{c51, &k1}, {c52, &k2}, {c53, &k3}, {c54, &k4}}));
  const Vec<N> k6 = f(axpy({{c61, &k1}, {c62, &k2}, {c63, &k3}, {c64, &k4}, {c65, &k5}}));

  StepResult<N> r;
  r.y = axpy({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  r.dy_end = f(r.y);
  const Vec<N>& k7 = r.dy_end;
  for (std::size_t i = 0; i < N; ++i)
    r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  return r;
}

/// Scaled max-norm of the error estimate; a step is acceptable when <= 1.
template <std::size_t N>
double error_norm(const Vec<N>& err, const Vec<N>& y0, const Vec<N>& y1, double atol, double rtol)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / scale);
  }
  return worst;
}

/// Standard step-size update for a fifth-order method.
inline double next_step_factor(double err_norm)
{
  if (err_norm == 0.0)
    return 5.0;
  return std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
}

} // namespace revgeo::ode
