#pragma once

// JSON and CSV serialization of library results. v is stored on the
// universal cover in memory; it is reduced to (-pi, pi] here, with the
// unreduced value kept as v_cover where it matters.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "revgeo/clairaut.hpp"
#include "revgeo/connect.hpp"
#include "revgeo/fermat.hpp"
#include "revgeo/geodesic.hpp"
#include "revgeo/verify.hpp"

namespace revgeo::io {

using nlohmann::json;

inline constexpr const char* format_version = "revgeo-report/1";

inline std::string fnv1a64(std::string_view data)
{
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Frame and sign conventions shared by every report.
inline json conventions()
{
  return {{"embedding", "r(u,v) = (phi(u) cos v, phi(u) sin v, psi(u))"},
          {"heading", "theta measured from +v (parallel, theta=0) towards +u (meridian, theta=pi/2)"},
          {"alpha", "signed angle with the parallel, alpha = theta"},
          {"beta", "angle with the meridian, beta = pi/2 - theta"},
          {"clairaut", "c = rho cos(alpha) = G dv/ds, rho = phi(u)"},
          {"v_range", "v reported in (-pi, pi]; v_cover keeps the unwrapped value"},
          {"angles", "radians"},
          {"sector_order", "phi_102, phi_203, phi_301"},
          {"indices", "terminals and branches are 1-based in reports"}};
}

inline json point(const SurfacePoint& p)
{
  return {{"u", p.u}, {"v", wrap_angle(p.v)}, {"v_cover", p.v}};
}

inline json triple(const std::array<double, 3>& a) { return json::array({a[0], a[1], a[2]}); }
inline json triple(const WeightTriple& b) { return json::array({b.b1, b.b2, b.b3}); }

inline json path(const ProfileSurface& S, const GeodesicPath& g)
{
  return {{"start", point(g.start())},
          {"end", point(g.end())},
          {"end_xyz", triple(S.embed_unchecked(g.end()))},
          {"length", g.length},
          {"theta_start", g.theta_start},
          {"theta_end", g.theta_end},
          {"meridian", g.meridian},
          {"clairaut_c", g.c_nominal},
          {"clairaut_drift", g.c_drift},
          {"speed_drift", g.speed_drift},
          {"drift_bound", g.drift_bound},
          {"samples", g.samples.size()}};
}

inline json connection(const ProfileSurface& S, const Connection& c)
{
  return {{"length", c.length()},
          {"winding", c.winding},
          {"residual", c.residual},
          {"ambiguous", c.ambiguous},
          {"candidates", c.candidates},
          {"departure_heading", c.departure_heading()},
          {"return_heading", c.return_heading()},
          {"path", path(S, c.path)}};
}

inline const char* mode_name(FermatMode m) { return m == FermatMode::interior ? "interior" : "vertex"; }

inline json floating(const FloatingResult& f)
{
  json j{{"mode", mode_name(f.mode)}, {"norms", triple(f.norms)}};
  if (f.mode == FermatMode::vertex)
    j["vertex"] = f.vertex + 1;
  return j;
}

inline json fermat(const ProfileSurface& S, const FermatResult& r)
{
  json j{{"mode", mode_name(r.mode)},
         {"A0", point(r.A0)},
         {"A0_xyz", triple(S.embed(r.A0))},
         {"objective", r.f_value},
         {"residual", r.residual},
         {"iterations", r.iterations},
         {"polish_iterations", r.polish_iterations},
         {"objective_history", r.f_history},
         {"residual_history", r.residual_history},
         {"floating_norms", triple(r.floating_norms)}};
  if (r.mode == FermatMode::vertex)
    j["vertex"] = r.vertex + 1;
  if (r.sector_angles)
    j["sector_angles"] = triple(*r.sector_angles);
  if (r.predicted_angles)
    j["predicted_angles"] = triple(*r.predicted_angles);
  json br = json::array();
  for (const auto& c : r.branches)
    br.push_back(connection(S, c));
  j["branches"] = br;
  return j;
}

inline json ratio_roots(const RatioRoots& r)
{
  return {{"plus", r.plus},
          {"minus", r.minus},
          {"measured", r.measured},
          {"choice", std::string(1, r.choice)},
          {"unique", r.unique},
          {"printed_sign_ok", r.printed_sign_ok}};
}

inline json theorem1(const Theorem1Result& t)
{
  return {{"alpha1", t.alpha1},   {"rho0", t.rho0},           {"alpha", triple(t.alpha)},
          {"c", triple(t.c)},     {"c2_over_c1", ratio_roots(t.r21)}, {"c3_over_c1", ratio_roots(t.r31)},
          {"in_window", t.in_window}};
}

inline json clairaut(const ClairautReport& rep)
{
  json br = json::array();
  for (const auto& b : rep.branches)
    br.push_back({{"theta", b.theta},
                  {"alpha", b.alpha},
                  {"beta", b.beta},
                  {"c_cos", b.c_cos},
                  {"c_sin", b.c_sin},
                  {"c_path", b.c_path},
                  {"c_drift", b.c_drift},
                  {"drift_bound", b.drift_bound}});
  json j{{"A0", point(rep.A0)}, {"rho0", rep.rho0}, {"branches", br}};
  if (rep.theorem1) {
    const auto& t = *rep.theorem1;
    j["theorem1"] = {{"numbering", t.clockwise ? "clockwise" : "counter-clockwise"},
                     {"constants", theorem1(t.constants)},
                     {"measured", triple(t.measured)},
                     {"deviation", triple(t.deviation)}};
  }
  return j;
}

inline json theorem2(const Theorem2Result& t)
{
  return {{"ratio", triple(t.ratio)},
          {"weight_share", triple(t.weight)},
          {"deviation", triple(t.deviation)},
          {"max_deviation", t.max_deviation},
          {"positivity", t.positivity}};
}

inline json sine_rule(const SineRuleResult& s)
{
  return {{"diameter", s.D_corrected},
          {"printed_diameter", s.D_printed},
          {"per_branch", triple(s.per_branch)},
          {"spread", s.spread},
          {"printed_matches", s.printed_matches}};
}

inline json rotation(const RotationExperiment& ex)
{
  json steps = json::array();
  for (const auto& st : ex.steps) {
    json ends = json::array();
    for (const auto& p : st.endpoints)
      ends.push_back(point(p));
    steps.push_back({{"delta", st.delta},
                     {"headings", triple(st.headings)},
                     {"endpoints", ends},
                     {"measured_angles", triple(st.measured)},
                     {"recovered_weights", triple(st.recovered)},
                     {"c_cos", triple(st.c_cos)}});
  }
  return {{"A0", point(ex.A0)},
          {"weights", triple(ex.b)},
          {"normalized_weights", triple(ex.b.normalized())},
          {"lengths", triple(ex.lengths)},
          {"theta0", ex.theta0},
          {"rho0", ex.rho0},
          {"steps", steps},
          {"max_weight_deviation", ex.max_weight_deviation},
          {"c_spread", triple(ex.c_spread)}};
}

inline json suite(const verify::SuiteResult& r)
{
  json m = json::object();
  for (const auto& x : r.metrics)
    m[x.name] = x.value;
  return {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"metrics", m}, {"notes", r.notes}};
}

/// Polyline CSV with columns s,u,v,du,dv,x,y,z,clairaut_c.
inline void write_path_csv(const std::filesystem::path& file, const ProfileSurface& S, const GeodesicPath& g)
{
  std::ofstream out(file);
  if (!out)
    throw ConfigError("cannot write " + file.string());
  out << "s,u,v,du,dv,x,y,z,clairaut_c\n";
  char line[512];
  for (const auto& smp : g.samples) {
    const auto& y = smp.state;
    const Vec3 x = S.embed_unchecked(y.point());
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", smp.s, y.u,
                  wrap_angle(y.v), y.du, y.dv, x[0], x[1], x[2], clairaut_of(S, y));
    out << line;
  }
  if (!out)
    throw ConfigError("error writing " + file.string());
}

} // namespace revgeo::io
