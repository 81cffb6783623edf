#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <vector>

#include "revgeo/errors.hpp"
#include "revgeo/geodesic.hpp"
#include "revgeo/surface.hpp"

namespace revgeo {

struct ConnectOptions
{
  int n_starts = 16;
  std::vector<int> windings{-1, 0, 1};
  double max_len = 10.0;
  double resid_tol = 1e-10; // endpoint residual in the chart metric at the target
  double tol = 1e-10;       // integrator tolerance
  int max_iter = 50;
  unsigned threads = 1;

  void validate() const
  {
    if (n_starts < 4)
      throw ConfigError("connect: n_starts must be at least 4");
    if (windings.empty())
      throw ConfigError("connect: need at least one winding");
    if (!(max_len > 0.0))
      throw ConfigError("connect: max_len must be positive");
    if (!(resid_tol > 0.0) || !(tol > 0.0))
      throw ConfigError("connect: tolerances must be positive");
    if (max_iter < 1)
      throw ConfigError("connect: max_iter must be positive");
  }
};

/// A geodesic arc between two points together with the search metadata.
struct Connection
{
  GeodesicPath path;
  int winding = 0;        // extra full turns in v relative to the wrapped difference
  double residual = 0.0;  // endpoint residual in the chart metric
  bool ambiguous = false; // a distinct candidate has length within 1e-6
  int candidates = 0;     // distinct converged geodesics seen

  double length() const { return path.length; }
  double departure_heading() const { return path.theta_start; }
  /// Heading at B of the reversed arc, i.e. the unit tangent U_{B A}.
  double return_heading() const { return wrap_angle(path.theta_end + pi); }
};

namespace detail {

struct ShotEnd
{
  double u, v;
};

// Endpoint of the geodesic exp_A(L (cos theta, sin theta)); negative L runs
// the same geodesic backwards, which keeps the map smooth through L = 0.
inline std::optional<ShotEnd> shot_end(const ProfileSurface& S, const SurfacePoint& A, double theta, double L,
                                       double tol)
{
  try {
    if (L < 0.0) {
      theta += pi;
      L = -L;
    }
    const GeodesicPath p = shoot_endpoints(S, A, theta, L, {tol});
    return ShotEnd{p.end().u, p.end().v};
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

struct Candidate
{
  double theta;
  double length;
  int winding;
  double residual;
};

class EndpointResidual
{
public:
  EndpointResidual(const ProfileSurface& S, const SurfacePoint& A, const SurfacePoint& target, double tol)
    : S_(S)
    , A_(A)
    , target_(target)
    , tol_(tol)
  {
    const Metric m = S.metric_unchecked(target.u);
    wu_ = std::sqrt(m.E);
    wv_ = std::sqrt(m.G);
  }

  double tol() const { return tol_; }

  std::optional<std::array<double, 2>> operator()(double theta, double L) const { return eval(theta, L, tol_); }

  std::optional<std::array<double, 2>> eval(double theta, double L, double tol) const
  {
    const auto e = shot_end(S_, A_, theta, L, tol);
    if (!e)
      return std::nullopt;
    return std::array<double, 2>{wu_ * (e->u - target_.u), wv_ * (e->v - target_.v)};
  }

private:
  const ProfileSurface& S_;
  SurfacePoint A_;
  SurfacePoint target_;
  double tol_;
  double wu_ = 1.0;
  double wv_ = 1.0;
};

inline double norm2(const std::array<double, 2>& r) { return std::hypot(r[0], r[1]); }

// Damped quasi-Newton (Broyden) on the 2-D endpoint residual over
// (heading, length). The Jacobian starts from forward differences with
// relative step 1e-7 and is rebuilt whenever a Broyden step fails. While
// the residual is large the shots run at a looser integrator tolerance.
//
// A run is abandoned once its length, less the slack allowed by the current
// residual, exceeds prune_above: it can then neither win nor tie.
inline std::optional<Candidate> newton_connect(const EndpointResidual& F, double theta, double L,
                                               const ConnectOptions& opts,
                                               double prune_above = std::numeric_limits<double>::infinity())
{
  constexpr int max_halvings = 10;
  constexpr int stall_window = 12;
  // Integrator tolerance used while the residual is above a threshold.
  auto tol_for = [&](double resid) {
    if (resid > 1e-2)
      return std::max(F.tol(), 1e-6);
    if (resid > 1e-5)
      return std::max(F.tol(), 1e-8);
    return F.tol();
  };

  double tol = std::max(F.tol(), 1e-6);
  auto r = F.eval(theta, L, tol);
  if (!r)
    return std::nullopt;
  double rn = norm2(*r);

  std::array<double, 4> J{};
  bool have_J = false;
  bool fresh_J = false;
  std::vector<double> history;

  for (int it = 0; it <= opts.max_iter; ++it) {
    if (tol_for(rn) < tol) {
      tol = tol_for(rn);
      r = F.eval(theta, L, tol);
      if (!r)
        return std::nullopt;
      rn = norm2(*r);
      have_J = false;
    }
    if (rn <= opts.resid_tol && tol == F.tol()) {
      if (L < 0.0) {
        theta += pi;
        L = -L;
      }
      return Candidate{wrap_angle(theta), L, 0, rn};
    }
    if (it == opts.max_iter)
      break;
    if (rn <= 1e-3 && std::abs(L) - 2.0 * rn > prune_above)
      return std::nullopt;
    // Give up on starts that stopped making progress.
    history.push_back(rn);
    if (history.size() > stall_window && rn > 0.5 * history[history.size() - 1 - stall_window])
      return std::nullopt;

    if (!have_J) {
      const double h_th = 1e-7 * std::max(1.0, std::abs(theta));
      const double h_L = 1e-7 * std::max(1.0, std::abs(L));
      const auto r_th = F.eval(theta + h_th, L, tol);
      const auto r_L = F.eval(theta, L + h_L, tol);
      if (!r_th || !r_L)
        return std::nullopt;
      J = {((*r_th)[0] - (*r)[0]) / h_th, ((*r_L)[0] - (*r)[0]) / h_L, ((*r_th)[1] - (*r)[1]) / h_th,
           ((*r_L)[1] - (*r)[1]) / h_L};
      have_J = true;
      fresh_J = true;
    }

    const double det = J[0] * J[3] - J[1] * J[2];
    const double jscale = std::max({std::abs(J[0] * J[3]), std::abs(J[1] * J[2]), 1e-300});
    if (!std::isfinite(det) || std::abs(det) <= 1e-12 * jscale) {
      if (fresh_J)
        return std::nullopt;
      have_J = false;
      continue;
    }
    double d_th = -(J[3] * (*r)[0] - J[1] * (*r)[1]) / det;
    double d_L = -(-J[2] * (*r)[0] + J[0] * (*r)[1]) / det;

    // Heading updates stay within a quarter turn, length updates within
    // half the search cap.
    const double cap = std::max(std::abs(d_th) / (pi / 2), std::abs(d_L) / (0.5 * opts.max_len));
    if (cap > 1.0) {
      d_th /= cap;
      d_L /= cap;
    }

    bool accepted = false;
    double t = 1.0;
    for (int k = 0; k <= max_halvings; ++k, t *= 0.5) {
      const double th_new = theta + t * d_th;
      const double L_new = L + t * d_L;
      if (std::abs(L_new) > opts.max_len)
        continue;
      const auto r_new = F.eval(th_new, L_new, tol);
      if (!r_new)
        continue;
      const double rn_new = norm2(*r_new);
      if (rn_new < rn) {
        // Broyden update with the accepted secant.
        const double sx = th_new - theta, sy = L_new - L;
        const double ss = sx * sx + sy * sy;
        const double y0 = (*r_new)[0] - (*r)[0] - (J[0] * sx + J[1] * sy);
        const double y1 = (*r_new)[1] - (*r)[1] - (J[2] * sx + J[3] * sy);
        if (ss > 0.0) {
          J[0] += y0 * sx / ss;
          J[1] += y0 * sy / ss;
          J[2] += y1 * sx / ss;
          J[3] += y1 * sy / ss;
        }
        theta = th_new;
        L = L_new;
        r = r_new;
        rn = rn_new;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fresh_J)
        return std::nullopt;
      have_J = false;
      continue;
    }
    fresh_J = false;
  }
  return std::nullopt;
}

inline bool same_point(const SurfacePoint& A, const SurfacePoint& B)
{
  return A.u == B.u && wrap_angle(B.v - A.v) == 0.0;
}

inline Connection finish(const ProfileSurface& S, const SurfacePoint& A, const Candidate& c,
                         const ConnectOptions& opts)
{
  Connection out;
  out.path = shoot(S, A, c.theta, c.length, {opts.tol});
  out.winding = c.winding;
  out.residual = c.residual;
  return out;
}

inline Connection zero_connection(const ProfileSurface& S, const SurfacePoint& A, const ConnectOptions& opts)
{
  Connection out;
  out.path = shoot(S, A, 0.0, 0.0, {opts.tol});
  out.candidates = 1;
  return out;
}

} // namespace detail

/// Shortest geodesic found from A to B.
///
/// Multi-starts a damped Newton solve over (heading, length) from n_starts
/// headings uniform on (-pi, pi] for each winding; lengths start at the
/// embedded chord. Among converged candidates the shortest wins, ties within
/// 1e-9 broken by smaller |winding| and then smaller heading. The result is
/// flagged ambiguous when a distinct candidate matches its length to 1e-6.
inline Connection connect_geodesic(const ProfileSurface& S, const SurfacePoint& A, const SurfacePoint& B,
                                   const ConnectOptions& opts = {})
{
  opts.validate();
  S.require_on_chart(A);
  S.require_on_chart(B);
  if (detail::same_point(A, B))
    return detail::zero_connection(S, A, opts);

  const double chord = distance3(S.embed(A), S.embed(B));
  if (chord > opts.max_len)
    throw ConfigError("connect: endpoints farther apart than max_len");

  struct Job
  {
    int winding;
    double theta0;
  };
  // Windings are searched in groups of increasing |w|. Each group may use
  // the best length of the finished groups to abandon hopeless starts.
  std::vector<int> levels;
  for (int w : opts.windings)
    levels.push_back(std::abs(w));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const double dv0 = wrap_angle(B.v - A.v);
  auto run = [&](const Job& job, double bound) -> std::optional<detail::Candidate> {
    const SurfacePoint target{B.u, A.v + dv0 + 2.0 * pi * job.winding};
    const detail::EndpointResidual F(S, A, target, opts.tol);
    auto c = detail::newton_connect(F, job.theta0, chord, opts, bound);
    if (c)
      c->winding = job.winding;
    return c;
  };

  std::vector<std::optional<detail::Candidate>> results;
  double best_len = std::numeric_limits<double>::infinity();
  for (int level : levels) {
    std::vector<Job> jobs;
    for (int w : opts.windings)
      if (std::abs(w) == level)
        for (int m = 0; m < opts.n_starts; ++m)
          jobs.push_back({w, -pi + 2.0 * pi * (m + 1) / opts.n_starts});
    const double bound = best_len + 1e-6;

    std::vector<std::optional<detail::Candidate>> part(jobs.size());
    if (opts.threads <= 1) {
      for (std::size_t i = 0; i < jobs.size(); ++i)
        part[i] = run(jobs[i], bound);
    } else {
      const std::size_t nt = std::min<std::size_t>(opts.threads, jobs.size());
      std::vector<std::future<void>> workers;
      for (std::size_t t = 0; t < nt; ++t)
        workers.push_back(std::async(std::launch::async, [&, t] {
          for (std::size_t i = t; i < jobs.size(); i += nt)
            part[i] = run(jobs[i], bound);
        }));
      for (auto& w : workers)
        w.get();
    }
    for (auto& r : part) {
      if (r)
        best_len = std::min(best_len, r->length);
      results.push_back(std::move(r));
    }
  }

  std::vector<detail::Candidate> found;
  for (const auto& r : results)
    if (r)
      found.push_back(*r);
  if (found.empty())
    throw NoConvergence("connect: endpoint unreachable within search budget");

  auto better = [](const detail::Candidate& a, const detail::Candidate& b) {
    if (std::abs(a.length - b.length) > 1e-9 * std::max(1.0, std::min(a.length, b.length)))
      return a.length < b.length;
    if (std::abs(a.winding) != std::abs(b.winding))
      return std::abs(a.winding) < std::abs(b.winding);
    if (a.winding != b.winding)
      return a.winding < b.winding;
    return a.theta < b.theta;
  };
  const detail::Candidate best = *std::min_element(found.begin(), found.end(), better);

  // Distinct geodesics: different winding or heading.
  std::vector<detail::Candidate> distinct;
  for (const auto& c : found) {
    const bool dup = std::any_of(distinct.begin(), distinct.end(), [&](const detail::Candidate& d) {
      return d.winding == c.winding && std::abs(wrap_angle(d.theta - c.theta)) <= 1e-6;
    });
    if (!dup)
      distinct.push_back(c);
  }

  Connection out = detail::finish(S, A, best, opts);
  out.candidates = static_cast<int>(distinct.size());
  for (const auto& c : distinct) {
    const bool same = c.winding == best.winding && std::abs(wrap_angle(c.theta - best.theta)) <= 1e-6;
    if (!same && std::abs(c.length - best.length) <= 1e-6)
      out.ambiguous = true;
  }
  return out;
}

/// Newton refinement from a known nearby geodesic. The target keeps the v
/// value closest to target_v_hint on the universal cover, so a branch
/// followed across iterations keeps its winding.
inline std::optional<Connection> refine_connection(const ProfileSurface& S, const SurfacePoint& A,
                                                   const SurfacePoint& B, double theta0, double L0,
                                                   double target_v_hint, const ConnectOptions& opts = {})
{
  S.require_on_chart(A);
  S.require_on_chart(B);
  if (detail::same_point(A, B))
    return detail::zero_connection(S, A, opts);
  const double turns = std::round((target_v_hint - B.v) / (2.0 * pi));
  const SurfacePoint target{B.u, B.v + 2.0 * pi * turns};
  const detail::EndpointResidual F(S, A, target, opts.tol);
  auto c = detail::newton_connect(F, theta0, L0, opts);
  if (!c)
    return std::nullopt;
  const double dv0 = wrap_angle(B.v - A.v);
  c->winding = static_cast<int>(std::lround((target.v - A.v - dv0) / (2.0 * pi)));
  Connection out = detail::finish(S, A, *c, opts);
  out.candidates = 1;
  return out;
}

/// Length of the shortest geodesic found from A to B.
inline double distance(const ProfileSurface& S, const SurfacePoint& A, const SurfacePoint& B,
                       const ConnectOptions& opts = {})
{
  return connect_geodesic(S, A, B, opts).length();
}

} // namespace revgeo
