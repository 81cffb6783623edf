#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "revgeo/errors.hpp"
#include "revgeo/ode.hpp"
#include "revgeo/surface.hpp"

namespace revgeo {

/// Chart position and coordinate velocity per unit arc length.
struct GeodesicState
{
  double u = 0.0;
  double v = 0.0;
  double du = 0.0;
  double dv = 0.0;

  SurfacePoint point() const { return {u, v}; }
};

struct StateDerivative
{
  double du = 0.0;
  double dv = 0.0;
  double ddu = 0.0;
  double ddv = 0.0;
};

struct PathSample
{
  double s = 0.0;
  GeodesicState state;
};

/// Arc-length sampled geodesic. Samples are taken at every accepted
/// integration step; the first has s = 0 and the last s = length.
struct GeodesicPath
{
  std::vector<PathSample> samples;
  double length = 0.0;
  double c_nominal = 0.0;   // Clairaut constant at launch
  double c_drift = 0.0;     // max |rho cos(alpha) - c_nominal| over samples
  double speed_drift = 0.0; // max |E du^2 + G dv^2 - 1| over samples
  double drift_bound = 0.0; // tolerance the producer guaranteed for both drifts
  double theta_start = 0.0;
  double theta_end = 0.0;
  bool meridian = false;

  SurfacePoint start() const { return samples.front().state.point(); }
  SurfacePoint end() const { return samples.back().state.point(); }
};

struct ShootOptions
{
  double tol = 1e-10;
};

/// Right-hand side of the geodesic equations of E du^2 + G dv^2.
inline StateDerivative geodesic_rhs(const Metric& m, const GeodesicState& y)
{
  StateDerivative d;
  d.du = y.du;
  d.dv = y.dv;
  d.ddu = -(m.E_u / (2.0 * m.E)) * y.du * y.du + (m.G_u / (2.0 * m.E)) * y.dv * y.dv;
  d.ddv = -(m.G_u / m.G) * y.du * y.dv;
  return d;
}

inline StateDerivative geodesic_derivative(const ProfileSurface& S, const GeodesicState& y)
{
  S.require_on_chart(y.point());
  return geodesic_rhs(S.metric_unchecked(y.u), y);
}

/// Unit-speed state leaving p with the given heading.
inline GeodesicState state_from_heading(const ProfileSurface& S, const SurfacePoint& p, double theta)
{
  const Metric m = S.metric_at(p.u);
  return {p.u, p.v, std::sin(theta) / std::sqrt(m.E), std::cos(theta) / std::sqrt(m.G)};
}

/// Velocity of a state in the orthonormal (parallel, meridian) frame.
inline TangentVector tangent_of(const ProfileSurface& S, const GeodesicState& y)
{
  const Metric m = S.metric_unchecked(y.u);
  return {y.point(), std::sqrt(m.G) * y.dv, std::sqrt(m.E) * y.du};
}

inline double heading_of(const ProfileSurface& S, const GeodesicState& y)
{
  return heading_from_tangent(tangent_of(S, y)).theta;
}

/// rho cos(alpha) for a geodesic leaving p with heading theta (signed).
inline double clairaut_constant(const ProfileSurface& S, const SurfacePoint& p, double theta)
{
  return S.jet(p.u).phi.f * std::cos(theta);
}

/// Clairaut first integral of a unit-speed state: rho * (sqrt(G) dv) = G dv.
inline double clairaut_of(const ProfileSurface& S, const GeodesicState& y)
{
  return S.metric_unchecked(y.u).G * y.dv;
}

inline double speed2_of(const ProfileSurface& S, const GeodesicState& y)
{
  const Metric m = S.metric_unchecked(y.u);
  return m.E * y.du * y.du + m.G * y.dv * y.dv;
}

namespace detail {

inline ode::Vec<4> to_vec(const GeodesicState& y) { return {y.u, y.v, y.du, y.dv}; }
inline GeodesicState from_vec(const ode::Vec<4>& y) { return {y[0], y[1], y[2], y[3]}; }

inline double min_step(double L) { return 1e-13 * std::max(1.0, L); }

// Profile parameters where the curve crosses the axis smoothly, so that a
// meridian can be continued through the pole.
inline std::vector<double> closing_axes(const ProfileSurface& S)
{
  std::vector<double> out;
  for (double a : S.axis_values()) {
    const ProfileJet j = S.jet(a);
    const double scale = std::max({1.0, std::abs(j.phi.df), std::abs(j.psi.df)});
    if (std::abs(j.phi.f) <= 1e-12 * scale && std::abs(j.phi.df) > 1e-12 && std::abs(j.psi.df) <= 1e-12 * scale)
      out.push_back(a);
  }
  return out;
}

inline GeodesicPath shoot_general(const ProfileSurface& S, const SurfacePoint& p, double theta, double L,
                                  double tol, bool record)
{
  GeodesicState y = state_from_heading(S, p, theta);
  const double c0 = clairaut_of(S, y);

  GeodesicPath path;
  path.c_nominal = c0;
  path.theta_start = wrap_angle(theta);
  path.samples.push_back({0.0, y});

  auto rhs = [&S](const ode::Vec<4>& v) {
    const GeodesicState st = from_vec(v);
    const StateDerivative d = geodesic_rhs(S.metric_unchecked(st.u), st);
    return ode::Vec<4>{d.du, d.dv, d.ddu, d.ddv};
  };

  double rho_max = std::max(1.0, S.jet(p.u).phi.f);
  double s = 0.0;
  double h = std::min(L, 1e-2);
  ode::Vec<4> y0 = to_vec(y);
  ode::Vec<4> dy0 = rhs(y0);
  while (s < L) {
    h = std::min(h, L - s);
    const bool last = (h == L - s);

    auto step = ode::dopri5_step<4>(rhs, y0, dy0, h);
    const GeodesicState cand = from_vec(step.y);

    const bool in_range = std::isfinite(cand.u) && cand.u >= S.u_min() && cand.u <= S.u_max();
    const Metric m = in_range ? S.metric_unchecked(cand.u) : Metric{};
    if (!in_range || !(m.rho > S.axis_guard())) {
      h *= 0.5;
      if (h < min_step(L))
        throw ChartExit("geodesic left the chart", s);
      continue;
    }

    const double err = ode::error_norm<4>(step.err, y0, step.y, tol, tol);
    const double budget = 10.0 * tol * std::max(rho_max, m.rho);
    const double dc = std::abs(m.G * cand.dv - c0);
    const double dspeed = std::abs(m.E * cand.du * cand.du + m.G * cand.dv * cand.dv - 1.0);

    if (err <= 1.0 && dc <= budget && dspeed <= budget) {
      s = last ? L : s + h;
      y = cand;
      y0 = step.y;
      dy0 = step.dy_end;
      rho_max = std::max(rho_max, m.rho);
      if (record || s == L)
        path.samples.push_back({s, y});
      path.c_drift = std::max(path.c_drift, dc);
      path.speed_drift = std::max(path.speed_drift, dspeed);
      h *= ode::next_step_factor(err);
    } else {
      h *= (err <= 1.0) ? 0.5 : std::min(0.5, ode::next_step_factor(err));
      if (h < min_step(L))
        throw NoConvergence("geodesic integration: step size underflow at s=" + std::to_string(s));
    }
  }

  path.length = L;
  path.drift_bound = 10.0 * tol * rho_max;
  path.theta_end = heading_of(S, y);
  return path;
}

// Meridians (dv = 0) reduce to u' = +-1/sqrt(E). They may pass through a
// smoothly closing axis; there the unfolded parameter is reflected and v
// jumps by pi.
inline GeodesicPath shoot_meridian(const ProfileSurface& S, const SurfacePoint& p, double theta, double L,
                                   double tol, bool record)
{
  const std::vector<double> axes = closing_axes(S);
  double dir = std::sin(theta) > 0.0 ? 1.0 : -1.0;
  double u = p.u;
  double v = p.v;

  auto make_state = [&](double uu, double vv, double d) {
    return GeodesicState{uu, vv, d / std::sqrt(S.metric_unchecked(uu).E), 0.0};
  };
  auto admissible = [&](double uu) {
    if (S.on_chart(uu))
      return true;
    for (double a : axes) {
      const double zone = 10.0 * S.axis_guard() / std::abs(S.jet(a).phi.df);
      if (std::abs(uu - a) <= zone)
        return true;
    }
    return false;
  };

  GeodesicPath path;
  path.meridian = true;
  path.c_nominal = 0.0;
  path.theta_start = wrap_angle(theta);
  path.samples.push_back({0.0, make_state(u, v, dir)});

  double s = 0.0;
  double h = std::min(L, 1e-2);
  while (s < L) {
    h = std::min(h, L - s);
    const bool last = (h == L - s);
    const double d = dir;
    auto rhs = [&S, d](const ode::Vec<1>& x) { return ode::Vec<1>{d / std::sqrt(S.metric_unchecked(x[0]).E)}; };
    const ode::Vec<1> x0{u};
    auto step = ode::dopri5_step<1>(rhs, x0, rhs(x0), h);
    double un = step.y[0];
    double vn = v;
    double dn = dir;
    for (double a : axes) {
      if ((u - a) * (un - a) < 0.0 || (un == a && u != a)) {
        un = 2.0 * a - un;
        vn += pi;
        dn = -dn;
        break;
      }
    }
    if (!admissible(un)) {
      h *= 0.5;
      if (h < min_step(L))
        throw ChartExit("meridian left the chart", s);
      continue;
    }
    const double err = ode::error_norm<1>(step.err, x0, step.y, tol, tol);
    if (err <= 1.0) {
      s = last ? L : s + h;
      u = un;
      v = vn;
      dir = dn;
      const GeodesicState st = make_state(u, v, dir);
      if (record || s == L)
        path.samples.push_back({s, st});
      path.speed_drift = std::max(path.speed_drift, std::abs(speed2_of(S, st) - 1.0));
      h *= ode::next_step_factor(err);
    } else {
      h *= std::min(0.5, ode::next_step_factor(err));
      if (h < min_step(L))
        throw NoConvergence("meridian integration: step size underflow at s=" + std::to_string(s));
    }
  }

  if (!S.on_chart(u))
    throw ChartExit("meridian ended inside the axis guard", L);
  path.length = L;
  path.drift_bound = 10.0 * tol * std::max(1.0, S.jet(p.u).phi.f);
  path.theta_end = dir > 0.0 ? pi / 2.0 : -pi / 2.0;
  return path;
}

} // namespace detail

/// True when a heading is an exact meridian direction up to rounding of
/// cos(pi/2).
inline bool is_meridian_heading(double theta) { return std::abs(std::cos(theta)) <= 1e-15; }

namespace detail {

inline GeodesicPath shoot_impl(const ProfileSurface& S, const SurfacePoint& p, double theta, double L,
                               const ShootOptions& opts, bool record)
{
  S.require_on_chart(p);
  if (!(L >= 0.0) || !std::isfinite(L))
    throw ConfigError("shoot: length must be finite and non-negative");
  if (!(opts.tol > 0.0))
    throw ConfigError("shoot: tolerance must be positive");

  if (L == 0.0) {
    GeodesicPath path;
    const GeodesicState y = state_from_heading(S, p, theta);
    path.samples.push_back({0.0, y});
    path.c_nominal = clairaut_of(S, y);
    path.theta_start = path.theta_end = wrap_angle(theta);
    path.drift_bound = 10.0 * opts.tol * std::max(1.0, S.jet(p.u).phi.f);
    path.meridian = is_meridian_heading(theta);
    return path;
  }
  if (is_meridian_heading(theta))
    return shoot_meridian(S, p, theta, L, opts.tol, record);
  return shoot_general(S, p, theta, L, opts.tol, record);
}

} // namespace detail

/// Exponential map: the unit-speed geodesic leaving p with the given
/// heading, integrated for arc length L with an adaptive Dormand-Prince
/// 5(4) pair. Steps are rejected when the error estimate exceeds tol or
/// when the Clairaut integral or the speed drift past 10 tol max(1, rho).
///
/// Throws ChartExit when the path leaves the chart.
inline GeodesicPath shoot(const ProfileSurface& S, const SurfacePoint& p, double theta, double L,
                          const ShootOptions& opts = {})
{
  return detail::shoot_impl(S, p, theta, L, opts, true);
}

/// Like shoot() but keeps only the first and last samples.
inline GeodesicPath shoot_endpoints(const ProfileSurface& S, const SurfacePoint& p, double theta, double L,
                                    const ShootOptions& opts = {})
{
  return detail::shoot_impl(S, p, theta, L, opts, false);
}

/// The same curve traversed from its end back to its start.
inline GeodesicPath reversed(const GeodesicPath& path)
{
  GeodesicPath r = path;
  r.samples.clear();
  r.samples.reserve(path.samples.size());
  for (auto it = path.samples.rbegin(); it != path.samples.rend(); ++it) {
    PathSample ps = *it;
    ps.s = path.length - ps.s;
    ps.state.du = -ps.state.du;
    ps.state.dv = -ps.state.dv;
    r.samples.push_back(ps);
  }
  if (!r.samples.empty()) {
    r.samples.front().s = 0.0;
    r.samples.back().s = path.length;
  }
  r.c_nominal = -path.c_nominal;
  r.theta_start = wrap_angle(path.theta_end + pi);
  r.theta_end = wrap_angle(path.theta_start + pi);
  return r;
}

} // namespace revgeo
