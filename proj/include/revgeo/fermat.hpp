#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "revgeo/connect.hpp"
#include "revgeo/errors.hpp"
#include "revgeo/geodesic.hpp"
#include "revgeo/surface.hpp"

namespace revgeo {

/// Three positive weights attached to the terminals A1, A2, A3.
struct WeightTriple
{
  double b1 = 1.0;
  double b2 = 1.0;
  double b3 = 1.0;

  double operator[](int i) const { return i == 0 ? b1 : (i == 1 ? b2 : b3); }
  double sum() const { return b1 + b2 + b3; }
  std::array<double, 3> array() const { return {b1, b2, b3}; }

  bool positive() const { return b1 > 0.0 && b2 > 0.0 && b3 > 0.0 && std::isfinite(sum()); }

  /// Strict triangle inequalities: the weighted point can float inside.
  bool valid_interior() const { return positive() && b1 < b2 + b3 && b2 < b1 + b3 && b3 < b1 + b2; }

  WeightTriple normalized() const
  {
    const double s = sum();
    return {b1 / s, b2 / s, b3 / s};
  }
};

/// Sector angles (phi_102, phi_203, phi_301). Entry p is bounded by the
/// branches p and p+1 (mod 3) and does not contain the third one.
using SectorAngles = std::array<double, 3>;

/// Sector angles of the balanced tree for weights b.
///
/// phi_i0j = arccos((b_k^2 - b_i^2 - b_j^2) / (2 b_i b_j)). This is pi minus
/// the angle of the weight triangle opposite b_k, which is evaluated with
/// atan2 and Heron's product so that nearly degenerate triples stay accurate.
inline SectorAngles lemma2_angles(const WeightTriple& b)
{
  if (!b.positive())
    throw DomainError("weights must be positive");
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    if (b[i] >= b[j] + b[k])
      throw DomainError("vertex regime: b" + std::to_string(i + 1) + " >= b" + std::to_string(j + 1) + " + b" +
                        std::to_string(k + 1));
  }
  const double s = b.sum();
  // 4 x area of the weight triangle
  const double heron = std::sqrt(s * (s - 2.0 * b[0]) * (s - 2.0 * b[1]) * (s - 2.0 * b[2]));
  SectorAngles out{};
  for (int p = 0; p < 3; ++p) {
    const int i = p, j = (p + 1) % 3, k = (p + 2) % 3;
    const double gamma_k = std::atan2(heron, b[i] * b[i] + b[j] * b[j] - b[k] * b[k]);
    out[p] = pi - gamma_k;
  }
  return out;
}

/// Sector angles between three departure headings at a common point.
inline SectorAngles sector_angles_from_headings(const std::array<double, 3>& theta)
{
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(wrap_angle(theta[i] - theta[j])) <= 1e-9)
        throw DomainError("degenerate tree: branches " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                          " depart with the same tangent");

  // Walk counter-clockwise from branch 1.
  const double d2 = wrap_positive(theta[1] - theta[0]);
  const double d3 = wrap_positive(theta[2] - theta[0]);
  SectorAngles out{};
  if (d2 < d3) { // order 1, 2, 3
    out[0] = d2;
    out[1] = d3 - d2;
    out[2] = 2.0 * pi - out[0] - out[1];
  } else { // order 1, 3, 2
    out[2] = d3;
    out[1] = d2 - d3;
    out[0] = 2.0 * pi - out[1] - out[2];
  }
  return out;
}

/// Weights b with sum C that balance a tree with the given sector angles:
/// b_i is proportional to the sine of the sector opposite branch i.
inline WeightTriple inverse_weights(const SectorAngles& phi, double C)
{
  if (!(C > 0.0) || !std::isfinite(C))
    throw ConfigError("inverse weights: C must be positive");
  for (int p = 0; p < 3; ++p)
    if (!(phi[p] > 0.0 && phi[p] < pi))
      throw DomainError("inverse weights: every sector angle must lie in (0, pi)");
  if (std::abs(phi[0] + phi[1] + phi[2] - 2.0 * pi) > 1e-9)
    throw DomainError("inverse weights: sector angles must sum to 2 pi");

  const double s1 = std::sin(phi[1]); // phi_203
  const double s2 = std::sin(phi[2]); // phi_301
  const double s3 = std::sin(phi[0]); // phi_102
  const double s = s1 + s2 + s3;
  return {C * s1 / s, C * s2 / s, C * s3 / s};
}

enum class FermatMode
{
  interior,
  vertex
};

/// Outcome of the floating-case test.
struct FloatingResult
{
  FermatMode mode = FermatMode::interior;
  int vertex = -1;               // 0-based index when mode == vertex
  std::array<double, 3> norms{}; // |b_j U_ij + b_k U_ik| at each A_i
  // Connections A_i -> A_j for the pairs (0,1), (1,2), (2,0).
  std::array<Connection, 3> sides;
};

namespace detail {

inline const char* const pair_names[3] = {"A1-A2", "A2-A3", "A3-A1"};

// Connection from A_i to A_j built from the stored side between them.
inline Connection side_from(const std::array<Connection, 3>& sides, int i, int j)
{
  if (j == (i + 1) % 3)
    return sides[i];
  Connection c = sides[j];
  c.path = reversed(c.path);
  return c;
}

} // namespace detail

/// Checks whether the weighted point floats strictly inside the triangle:
/// at every vertex A_i the weighted sum b_j U_ij + b_k U_ik of the unit
/// tangents towards the other vertices must be longer than b_i.
inline FloatingResult floating_test(const ProfileSurface& S, const std::array<SurfacePoint, 3>& pts,
                                    const WeightTriple& b, const ConnectOptions& copts = {})
{
  if (!b.positive())
    throw DomainError("weights must be positive");
  for (int i = 0; i < 3; ++i) {
    S.require_on_chart(pts[i]);
    const int j = (i + 1) % 3;
    if (detail::same_point(pts[i], pts[j]))
      throw DomainError("terminals must be pairwise distinct");
  }

  FloatingResult out;
  for (int i = 0; i < 3; ++i)
    out.sides[i] = connect_geodesic(S, pts[i], pts[(i + 1) % 3], copts);

  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double tj = detail::side_from(out.sides, i, j).departure_heading();
    const double tk = detail::side_from(out.sides, i, k).departure_heading();
    if (std::abs(std::sin(tj - tk)) <= 1e-9)
      throw DomainError("terminals lie on one geodesic");
    const double x = b[j] * std::cos(tj) + b[k] * std::cos(tk);
    const double y = b[j] * std::sin(tj) + b[k] * std::sin(tk);
    out.norms[i] = std::hypot(x, y);
    if (!(out.norms[i] > b[i]) && b[i] - out.norms[i] >= worst) {
      worst = b[i] - out.norms[i];
      out.mode = FermatMode::vertex;
      out.vertex = i;
    }
  }
  return out;
}

struct FermatOptions
{
  double grad_tol = 0.0;  // residual target; 0 selects 1e-8 (b1 + b2 + b3)
  double angle_tol = 1e-5; // allowed gap between measured and predicted sectors
  int max_iter = 500;
  int max_halvings = 60;
  double armijo = 1e-4;
  std::optional<SurfacePoint> start; // default: chart centroid of the terminals
  ConnectOptions connect;

  void validate() const
  {
    if (grad_tol < 0.0 || !(angle_tol > 0.0))
      throw ConfigError("fermat: tolerances must be positive");
    if (max_iter < 1 || max_halvings < 1)
      throw ConfigError("fermat: iteration caps must be positive");
    if (!(armijo > 0.0 && armijo < 1.0))
      throw ConfigError("fermat: armijo constant must lie in (0, 1)");
    connect.validate();
  }
};

struct FermatResult
{
  SurfacePoint A0;
  std::array<Connection, 3> branches; // A0 -> A_i
  double f_value = 0.0;
  double residual = 0.0; // |sum b_i U_i|, or the failing norm in vertex mode
  std::optional<SectorAngles> sector_angles;
  std::optional<SectorAngles> predicted_angles;
  FermatMode mode = FermatMode::interior;
  int vertex = -1;
  int iterations = 0;        // accepted descent steps
  int polish_iterations = 0; // accepted Newton steps
  std::vector<double> f_history;        // f after every accepted descent step
  std::vector<double> residual_history; // |R| after every accepted step
  std::vector<std::string> warnings;
  std::array<double, 3> floating_norms{};
};

namespace detail {

struct Tree
{
  SurfacePoint A0;
  std::array<Connection, 3> br;
  double f = 0.0;
  double R_par = 0.0, R_mer = 0.0;

  double grad() const { return std::hypot(R_par, R_mer); }
  double min_length() const { return std::min({br[0].length(), br[1].length(), br[2].length()}); }
};

inline void assemble(Tree& t, const WeightTriple& b)
{
  t.f = 0.0;
  t.R_par = t.R_mer = 0.0;
  for (int i = 0; i < 3; ++i) {
    t.f += b[i] * t.br[i].length();
    const double th = t.br[i].departure_heading();
    t.R_par += b[i] * std::cos(th);
    t.R_mer += b[i] * std::sin(th);
  }
}

class FermatProblem
{
public:
  FermatProblem(const ProfileSurface& S, const std::array<SurfacePoint, 3>& pts, const WeightTriple& b,
                const ConnectOptions& copts)
    : S_(S)
    , pts_(pts)
    , b_(b)
    , copts_(copts)
  {
  }

  Tree full(const SurfacePoint& A0) const
  {
    Tree t;
    t.A0 = A0;
    for (int i = 0; i < 3; ++i)
      t.br[i] = connect_geodesic(S_, A0, pts_[i], copts_);
    assemble(t, b_);
    return t;
  }

  // Follows each branch of prev to a nearby base point. Returns nothing when
  // the point is off chart or a branch collapses.
  std::optional<Tree> warm(const SurfacePoint& A0, const Tree& prev) const
  {
    if (!S_.on_chart(A0))
      return std::nullopt;
    Tree t;
    t.A0 = A0;
    for (int i = 0; i < 3; ++i) {
      if (same_point(A0, pts_[i]))
        return std::nullopt;
      const Connection& p = prev.br[i];
      auto c = refine_connection(S_, A0, pts_[i], p.departure_heading(), p.length(), p.path.end().v, copts_);
      if (c)
        t.br[i] = std::move(*c);
      else
        try {
          t.br[i] = connect_geodesic(S_, A0, pts_[i], copts_);
        } catch (const NumericalError&) {
          return std::nullopt;
        }
      if (!(t.br[i].length() > 0.0))
        return std::nullopt;
    }
    assemble(t, b_);
    return t;
  }

private:
  const ProfileSurface& S_;
  std::array<SurfacePoint, 3> pts_;
  WeightTriple b_;
  ConnectOptions copts_;
};

inline SurfacePoint chart_centroid(const std::array<SurfacePoint, 3>& pts)
{
  double u = 0.0, dv = 0.0;
  for (const auto& p : pts) {
    u += p.u / 3.0;
    dv += wrap_angle(p.v - pts[0].v) / 3.0;
  }
  return {u, pts[0].v + dv};
}

// Point reached from A0 after moving h along the unit chart directions.
inline SurfacePoint chart_offset(const ProfileSurface& S, const SurfacePoint& A0, double h_par, double h_mer)
{
  const Metric m = S.metric_unchecked(A0.u);
  return {A0.u + h_mer / std::sqrt(m.E), A0.v + h_par / std::sqrt(m.G)};
}

} // namespace detail

/// Weighted Fermat-Torricelli point of three terminals on S.
///
/// Descends along R = sum b_i U_i (the negative gradient of f) with Armijo
/// backtracking, stepping by the exponential map. Once R is small the
/// descent is noise limited by the length accuracy of the connections, so
/// the remaining digits come from Newton steps on R = 0 with a forward
/// difference Jacobian in the orthonormal frame. Throughout the iteration
/// branches are followed by warm-started refinement; the final branches are
/// recomputed with the full multi-start search.
inline FermatResult solve_fermat(const ProfileSurface& S, const std::array<SurfacePoint, 3>& pts,
                                 const WeightTriple& b, const FermatOptions& opts = {})
{
  opts.validate();
  const FloatingResult ft = floating_test(S, pts, b, opts.connect);

  FermatResult out;
  out.floating_norms = ft.norms;
  if (b.valid_interior())
    out.predicted_angles = lemma2_angles(b);

  if (ft.mode == FermatMode::vertex) {
    const int i = ft.vertex;
    out.mode = FermatMode::vertex;
    out.vertex = i;
    out.A0 = pts[i];
    out.residual = ft.norms[i];
    out.branches[i] = detail::zero_connection(S, pts[i], opts.connect);
    for (int j : {(i + 1) % 3, (i + 2) % 3}) {
      out.branches[j] = detail::side_from(ft.sides, i, j);
      out.f_value += b[j] * out.branches[j].length();
    }
    out.f_history.push_back(out.f_value);
    out.warnings.push_back("vertex regime: minimum at A" + std::to_string(i + 1));
    return out;
  }

  const double grad_tol = opts.grad_tol > 0.0 ? opts.grad_tol : 1e-8 * b.sum();
  const double polish_switch = 1e-3 * b.sum();
  const detail::FermatProblem P(S, pts, b, opts.connect);

  SurfacePoint start = opts.start ? *opts.start : detail::chart_centroid(pts);
  S.require_on_chart(start);

  constexpr int max_restarts = 2;
  for (int restart = 0;; ++restart) {
    detail::Tree T = P.full(start);
    out.f_history.push_back(T.f);
    out.residual_history.push_back(T.grad());

    // Alternate bursts of descent and Newton steps. Descent makes steady
    // progress far from the optimum; Newton takes over near it or when the
    // descent crawls through a badly conditioned valley.
    constexpr int descent_burst = 50;
    constexpr int newton_burst = 30;
    double lambda = 0.1 * T.min_length();
    int total = 0;
    bool newton_stuck = false;
    while (T.grad() > grad_tol) {
      bool progress = false;
      for (int burst = 0; burst < descent_burst && T.grad() > grad_tol && (T.grad() > polish_switch || newton_stuck);
           ++burst) {
        if (++total > opts.max_iter)
          throw NoConvergence("fermat: iteration cap reached");
        const double g = T.grad();
        const double dir = std::atan2(T.R_mer, T.R_par);
        lambda = std::min(lambda, 0.5 * T.min_length());

        std::optional<detail::Tree> next;
        for (int h = 0; h <= opts.max_halvings; ++h, lambda *= 0.5) {
          GeodesicPath step;
          try {
            step = shoot_endpoints(S, T.A0, dir, lambda, {opts.connect.tol});
          } catch (const NumericalError&) {
            continue;
          }
          auto trial = P.warm(step.end(), T);
          if (trial && trial->f <= T.f - opts.armijo * lambda * g) {
            next = std::move(trial);
            break;
          }
        }
        if (!next)
          break; // noise limited
        T = std::move(*next);
        progress = true;
        ++out.iterations;
        out.f_history.push_back(T.f);
        out.residual_history.push_back(T.grad());
        lambda *= 2.0;
      }

      // Newton on R = 0 with a forward difference Jacobian. Away from the
      // optimum a step must also lower f.
      newton_stuck = false;
      for (int it = 0; it < newton_burst && T.grad() > grad_tol; ++it) {
        if (++total > opts.max_iter)
          throw NoConvergence("fermat: iteration cap reached");
        const bool near = T.grad() <= polish_switch;
        const double h = 1e-6 * T.min_length();
        const auto Tp = P.warm(detail::chart_offset(S, T.A0, h, 0.0), T);
        const auto Tm = P.warm(detail::chart_offset(S, T.A0, 0.0, h), T);
        std::optional<detail::Tree> next;
        if (Tp && Tm) {
          const double J00 = (Tp->R_par - T.R_par) / h, J01 = (Tm->R_par - T.R_par) / h;
          const double J10 = (Tp->R_mer - T.R_mer) / h, J11 = (Tm->R_mer - T.R_mer) / h;
          const double det = J00 * J11 - J01 * J10;
          if (std::isfinite(det) && det != 0.0) {
            const double d_par = -(J11 * T.R_par - J01 * T.R_mer) / det;
            const double d_mer = -(-J10 * T.R_par + J00 * T.R_mer) / det;
            double t = 1.0;
            for (int k = 0; k < 12; ++k, t *= 0.5) {
              auto trial = P.warm(detail::chart_offset(S, T.A0, t * d_par, t * d_mer), T);
              if (trial && trial->grad() < T.grad() && (near || trial->f < T.f)) {
                next = std::move(trial);
                break;
              }
            }
          }
        }
        if (!next) {
          newton_stuck = true;
          break;
        }
        T = std::move(*next);
        progress = true;
        ++out.polish_iterations;
        if (!near)
          out.f_history.push_back(T.f);
        out.residual_history.push_back(T.grad());
      }

      if (T.grad() > grad_tol && !progress)
        throw NoConvergence("fermat: backtracking exhausted before the residual reached " +
                            std::to_string(grad_tol));
    }

    // The followed branches must still be the shortest ones.
    detail::Tree F = P.full(T.A0);
    bool switched = false;
    for (int i = 0; i < 3; ++i)
      if (F.br[i].length() < T.br[i].length() - 1e-9 * std::max(1.0, T.br[i].length()))
        switched = true;
    if (switched && restart < max_restarts) {
      out.warnings.push_back("a followed branch stopped being the shortest geodesic; restarted");
      start = T.A0;
      continue;
    }
    if (switched)
      throw NoConvergence("fermat: shortest branches keep switching");
    if (F.grad() > grad_tol) {
      // Same geodesics, recomputed independently: keep the followed ones.
      F = T;
    }

    out.A0 = F.A0;
    out.branches = F.br;
    out.f_value = F.f;
    out.residual = F.grad();
    break;
  }

  std::array<double, 3> heads{};
  for (int i = 0; i < 3; ++i) {
    heads[i] = out.branches[i].departure_heading();
    if (out.branches[i].ambiguous)
      out.warnings.push_back(std::string("branch to A") + std::to_string(i + 1) +
                             " is ambiguous: another geodesic has the same length");
  }
  out.sector_angles = sector_angles_from_headings(heads);
  if (out.predicted_angles)
    for (int p = 0; p < 3; ++p)
      if (std::abs((*out.sector_angles)[p] - (*out.predicted_angles)[p]) > opts.angle_tol)
        out.warnings.push_back(std::string("sector angle at ") + detail::pair_names[p] +
                               " differs from the weight prediction by more than angle_tol");
  return out;
}

/// Sector angles at A0 between the shortest geodesics towards the terminals.
inline SectorAngles measure_sector_angles(const ProfileSurface& S, const SurfacePoint& A0,
                                          const std::array<SurfacePoint, 3>& pts, const ConnectOptions& copts = {})
{
  std::array<double, 3> heads{};
  for (int i = 0; i < 3; ++i) {
    if (detail::same_point(A0, pts[i]))
      throw DomainError("sector angles: A0 coincides with A" + std::to_string(i + 1));
    heads[i] = connect_geodesic(S, A0, pts[i], copts).departure_heading();
  }
  return sector_angles_from_headings(heads);
}

} // namespace revgeo
