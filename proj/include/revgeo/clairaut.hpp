#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "revgeo/connect.hpp"
#include "revgeo/errors.hpp"
#include "revgeo/fermat.hpp"
#include "revgeo/geodesic.hpp"
#include "revgeo/surface.hpp"

namespace revgeo {

/// w(x, y, z) = (x^2 + y^2 - z^2) / (2 x y), the cosine of the angle
/// opposite z in a triangle with sides x, y, z.
inline double w_eval(double x, double y, double z)
{
  if (x == 0.0 || y == 0.0)
    throw DomainError("w: zero denominator");
  return (x * x + y * y - z * z) / (2.0 * x * y);
}

/// Clairaut data of one branch leaving A0.
struct BranchClairaut
{
  double theta = 0.0; // departure heading
  double alpha = 0.0; // signed angle with the parallel (= theta)
  double beta = 0.0;  // angle with the meridian (= pi/2 - theta)
  double c_cos = 0.0; // rho0 cos alpha
  double c_sin = 0.0; // rho0 sin beta
  double c_path = 0.0;      // launch constant recorded by the integrator
  double drift_bound = 0.0; // declared drift tolerance of the path
  double c_drift = 0.0;     // observed drift along the path
};

/// Both roots of the quadratic for c_j / c_1 and the one selected by the
/// angular relations.
struct RatioRoots
{
  double plus = 0.0;     // w + |tan a1| sqrt(1 - w^2)
  double minus = 0.0;    // w - |tan a1| sqrt(1 - w^2)
  double measured = 0.0; // cos a_j / cos a_1 from the angular relations
  char choice = '+';
  bool unique = true;          // exactly one root reproduces the measured ratio
  bool printed_sign_ok = true; // the reference closed form, written with a minus sign, is the chosen root
};

struct Theorem1Result
{
  double alpha1 = 0.0;
  double rho0 = 0.0;
  std::array<double, 3> alpha{};  // a1, a2 = pi + a1 - phi_102, a3 = a1 - pi + phi_301
  std::array<double, 3> c{};      // rho0 cos a_i
  RatioRoots r21, r31;
  bool in_window = true; // a1 in (pi/2, pi)
};

/// Closed forms for the Clairaut constants of a balanced tree given the
/// angle a1 of branch 1 with the parallel.
///
/// Both roots of each quadratic are returned. The root is selected by
/// comparing with cos a_j / cos a1 from the angular relations; a root counts
/// as matching within 1e-12 max(1, |ratio|).
inline Theorem1Result theorem1_constants(const WeightTriple& b, double alpha1, double rho0)
{
  if (!b.valid_interior())
    throw DomainError("theorem1_constants: weights violate the triangle inequalities");
  if (std::abs(std::cos(alpha1)) < 1e-12)
    throw DomainError("theorem1_constants: alpha1 = pi/2 makes tan singular");
  if (!(rho0 > 0.0))
    throw DomainError("theorem1_constants: rho0 must be positive");

  const SectorAngles phi = lemma2_angles(b);
  Theorem1Result out;
  out.alpha1 = alpha1;
  out.rho0 = rho0;
  out.in_window = alpha1 > pi / 2 && alpha1 < pi;
  out.alpha = {alpha1, pi + alpha1 - phi[0], alpha1 - pi + phi[2]};
  for (int i = 0; i < 3; ++i)
    out.c[i] = rho0 * std::cos(out.alpha[i]);

  const double t = std::abs(std::tan(alpha1));
  auto roots = [&](double w, double measured) {
    RatioRoots r;
    const double s = t * std::sqrt(std::max(0.0, 1.0 - w * w));
    r.plus = w + s;
    r.minus = w - s;
    r.measured = measured;
    const double tol = 1e-12 * std::max(1.0, std::abs(measured));
    const bool plus_ok = std::abs(r.plus - measured) <= tol;
    const bool minus_ok = std::abs(r.minus - measured) <= tol;
    r.choice = std::abs(r.plus - measured) <= std::abs(r.minus - measured) ? '+' : '-';
    r.unique = plus_ok != minus_ok;
    r.printed_sign_ok = r.choice == '-';
    return r;
  };
  const double c1 = std::cos(alpha1);
  out.r21 = roots(w_eval(b.b1, b.b2, b.b3), std::cos(out.alpha[1]) / c1);
  out.r31 = roots(w_eval(b.b1, b.b3, b.b2), std::cos(out.alpha[2]) / c1);
  return out;
}

/// Closed-form constants compared with a measured tree.
///
/// The angular relations hold for branches numbered clockwise around A0
/// with branch 1 taken outward and branches 2, 3 taken towards A0. A tree
/// numbered counter-clockwise is the mirror image, handled with a1 = -theta1.
struct Theorem1Comparison
{
  Theorem1Result constants;
  bool clockwise = false;
  std::array<double, 3> measured{}; // c_cos_1, -c_cos_2, -c_cos_3
  std::array<double, 3> deviation{};
};

struct ClairautReport
{
  SurfacePoint A0;
  double rho0 = 0.0;
  std::array<BranchClairaut, 3> branches;
  std::optional<Theorem1Comparison> theorem1;
};

/// Clairaut constants of three branches leaving A0, read off their
/// departure tangents.
inline ClairautReport branch_report(const ProfileSurface& S, const SurfacePoint& A0,
                                    const std::array<GeodesicPath, 3>& branches, const WeightTriple& b)
{
  S.require_on_chart(A0);
  ClairautReport rep;
  rep.A0 = A0;
  rep.rho0 = S.metric_at(A0.u).rho;
  for (int i = 0; i < 3; ++i) {
    const GeodesicPath& p = branches[i];
    if (p.samples.empty())
      throw DomainError("branch " + std::to_string(i + 1) + " has no samples");
    const SurfacePoint s = p.start();
    if (std::abs(s.u - A0.u) > 1e-12 * std::max(1.0, std::abs(A0.u)) || std::abs(wrap_angle(s.v - A0.v)) > 1e-12)
      throw DomainError("branch " + std::to_string(i + 1) + " not anchored at A0");
    BranchClairaut& c = rep.branches[i];
    c.theta = p.theta_start;
    c.alpha = c.theta;
    c.beta = pi / 2 - c.theta;
    c.c_cos = rep.rho0 * std::cos(c.alpha);
    c.c_sin = rep.rho0 * std::sin(c.beta);
    c.c_path = p.c_nominal;
    c.drift_bound = p.drift_bound;
    c.c_drift = p.c_drift;
  }

  if (b.valid_interior() && std::abs(std::cos(rep.branches[0].theta)) >= 1e-12) {
    const std::array<double, 3> th{rep.branches[0].theta, rep.branches[1].theta, rep.branches[2].theta};
    try {
      const SectorAngles sec = sector_angles_from_headings(th);
      Theorem1Comparison cmp;
      // Clockwise numbering: branch 2 follows branch 1 turning clockwise.
      cmp.clockwise = std::abs(wrap_angle(th[0] - sec[0] - th[1])) < std::abs(wrap_angle(th[0] + sec[0] - th[1]));
      const double a1 = cmp.clockwise ? th[0] : -th[0];
      cmp.constants = theorem1_constants(b, a1, rep.rho0);
      cmp.measured = {rep.branches[0].c_cos, -rep.branches[1].c_cos, -rep.branches[2].c_cos};
      for (int i = 0; i < 3; ++i)
        cmp.deviation[i] = std::abs(cmp.constants.c[i] - cmp.measured[i]);
      rep.theorem1 = cmp;
    } catch (const DomainError&) {
      // degenerate tree: no comparison
    }
  }
  return rep;
}

/// Probe of c_sin_i / sum c_sin = b_i / sum b on a sphere.
struct Theorem2Result
{
  std::array<double, 3> ratio{};     // c_sin_i / sum c_sin
  std::array<double, 3> weight{};    // b_i / sum b
  std::array<double, 3> deviation{}; // |ratio - weight|
  double max_deviation = 0.0;
  bool positivity = false; // all c_sin_i > 0, the hypothesis of the claim
};

inline Theorem2Result theorem2_ratios(const ProfileSurface& S, const ClairautReport& rep, const WeightTriple& b)
{
  if (!S.is_sphere())
    throw ConfigError("theorem2_ratios: surface must be a sphere");
  if (!b.positive())
    throw DomainError("theorem2_ratios: weights must be positive");
  double sum = 0.0;
  for (const auto& br : rep.branches)
    sum += br.c_sin;
  // Measured constants carry solver noise near 1e-9; below this the ratio is meaningless.
  if (std::abs(sum) <= 1e-7 * std::max(1.0, rep.rho0))
    throw DomainError("theorem2_ratios: undefined ratio, the sine constants sum to zero");

  Theorem2Result out;
  out.positivity = true;
  for (int i = 0; i < 3; ++i) {
    out.ratio[i] = rep.branches[i].c_sin / sum;
    out.weight[i] = b[i] / b.sum();
    out.deviation[i] = std::abs(out.ratio[i] - out.weight[i]);
    out.max_deviation = std::max(out.max_deviation, out.deviation[i]);
    out.positivity = out.positivity && rep.branches[i].c_sin > 0.0;
  }
  return out;
}

struct SineRuleResult
{
  double D_corrected = 0.0; // circumdiameter of the weight triangle
  double D_printed = 0.0;   // uncorrected reference form
  std::array<double, 3> per_branch{}; // b_i / sin phi_jk (sector opposite branch i)
  double spread = 0.0;                // max - min of per_branch
  bool printed_matches = false;
};

inline SineRuleResult sine_rule_diameter(const WeightTriple& b)
{
  if (!b.positive())
    throw DomainError("sine rule: weights must be positive");
  const double f12 = b.b1 + b.b2 - b.b3;
  const double f23 = b.b2 + b.b3 - b.b1;
  const double f13 = b.b1 + b.b3 - b.b2;
  if (!(f12 > 0.0 && f23 > 0.0 && f13 > 0.0))
    throw DomainError("sine rule: degenerate weight triangle");

  SineRuleResult out;
  const double prod = b.b1 * b.b2 * b.b3;
  out.D_corrected = 2.0 * prod / std::sqrt(b.sum() * f12 * f23 * f13);
  out.D_printed = 2.0 * prod / std::sqrt(f12 * f23 * (b.b3 + b.b2 - b.b1));

  const SectorAngles phi = lemma2_angles(b);
  out.per_branch = {b.b1 / std::sin(phi[1]), b.b2 / std::sin(phi[2]), b.b3 / std::sin(phi[0])};
  const auto [lo, hi] = std::minmax_element(out.per_branch.begin(), out.per_branch.end());
  out.spread = *hi - *lo;
  out.printed_matches = std::abs(out.D_printed - out.D_corrected) <= 1e-12 * out.D_corrected;
  return out;
}

struct RotationStep
{
  double delta = 0.0;
  std::array<double, 3> headings{};
  std::array<GeodesicPath, 3> branches;
  std::array<SurfacePoint, 3> endpoints;
  SectorAngles measured{};
  WeightTriple recovered; // normalized to sum 1
  std::array<double, 3> c_cos{};
};

struct RotationExperiment
{
  SurfacePoint A0;
  WeightTriple b;
  std::array<double, 3> lengths{};
  double theta0 = 0.0;
  double rho0 = 0.0;
  std::vector<RotationStep> steps;
  double max_weight_deviation = 0.0; // largest |recovered_i - b_i / sum b|
  std::array<double, 3> c_spread{};  // max - min of c_cos_i over delta
};

/// Rotates a balanced tree about A0 by each delta and records the weights
/// recovered from the measured sectors and the branch Clairaut constants.
inline RotationExperiment rotate_tree_experiment(const ProfileSurface& S, const SurfacePoint& A0,
                                                 const WeightTriple& b, const std::array<double, 3>& lengths,
                                                 double theta0, const std::vector<double>& deltas,
                                                 const ConnectOptions& copts = {})
{
  S.require_on_chart(A0);
  if (!b.valid_interior())
    throw DomainError("rotation: weights violate the triangle inequalities");
  for (double L : lengths)
    if (!(L > 0.0))
      throw ConfigError("rotation: branch lengths must be positive");
  if (deltas.empty())
    throw ConfigError("rotation: empty delta list");

  const SectorAngles phi = lemma2_angles(b);
  const WeightTriple bn = b.normalized();
  RotationExperiment out;
  out.A0 = A0;
  out.b = b;
  out.lengths = lengths;
  out.theta0 = theta0;
  out.rho0 = S.metric_at(A0.u).rho;

  for (double delta : deltas) {
    RotationStep st;
    st.delta = delta;
    st.headings = {theta0 + delta, theta0 + delta + phi[0], theta0 + delta + phi[0] + phi[1]};
    for (int i = 0; i < 3; ++i) {
      st.branches[i] = shoot(S, A0, st.headings[i], lengths[i], {copts.tol});
      st.endpoints[i] = st.branches[i].end();
      st.c_cos[i] = out.rho0 * std::cos(st.headings[i]);
    }
    st.measured = measure_sector_angles(S, A0, st.endpoints, copts);
    st.recovered = inverse_weights(st.measured, 1.0);
    for (int i = 0; i < 3; ++i)
      out.max_weight_deviation = std::max(out.max_weight_deviation, std::abs(st.recovered[i] - bn[i]));
    out.steps.push_back(std::move(st));
  }
  for (int i = 0; i < 3; ++i) {
    double lo = out.steps.front().c_cos[i], hi = lo;
    for (const auto& st : out.steps) {
      lo = std::min(lo, st.c_cos[i]);
      hi = std::max(hi, st.c_cos[i]);
    }
    out.c_spread[i] = hi - lo;
  }
  return out;
}

} // namespace revgeo
