#pragma once

// Scenario files: one JSON document describing a surface, named points,
// weights, solver options and the inputs of each CLI command. Unknown keys
// are rejected so that typos surface as configuration errors. Angles accept
// either a number in radians or {"deg": x}.

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "revgeo/connect.hpp"
#include "revgeo/fermat.hpp"
#include "revgeo/io.hpp"
#include "revgeo/surface.hpp"
#include "revgeo/verify.hpp"

namespace revgeo {

inline constexpr const char* scenario_schema = "revgeo-scenario/1";

struct ShotSpec
{
  SurfacePoint from;
  double heading = 0.0;
  double length = 0.0;
};

struct InverseSpec
{
  SectorAngles angles{};
  double sum = 1.0;
};

struct Theorem1Spec
{
  double alpha1 = 0.0;
  double rho0 = 1.0;
};

struct RotationSpec
{
  SurfacePoint A0;
  std::array<double, 3> lengths{};
  double theta0 = 0.0;
  std::vector<double> deltas;
};

struct Scenario
{
  std::string digest; // FNV-1a of the canonical JSON text
  std::string description;
  ProfileSpec surface_spec;
  std::map<std::string, SurfacePoint> points;
  std::optional<WeightTriple> weights;
  double tol = 1e-10;
  ConnectOptions connect;
  FermatOptions fermat;
  std::vector<ShotSpec> shots;
  std::vector<std::array<std::string, 2>> pairs;
  std::array<std::string, 3> terminals{"A1", "A2", "A3"};
  std::optional<InverseSpec> inverse;
  std::optional<Theorem1Spec> theorem1;
  std::optional<RotationSpec> rotation;
  verify::VerifyOptions verify;

  ProfileSurface surface() const { return make_surface(surface_spec); }

  const SurfacePoint& point(const std::string& name) const
  {
    auto it = points.find(name);
    if (it == points.end())
      throw ConfigError("unknown point '" + name + "'");
    return it->second;
  }

  std::array<SurfacePoint, 3> terminal_points() const
  {
    return {point(terminals[0]), point(terminals[1]), point(terminals[2])};
  }

  const WeightTriple& require_weights() const
  {
    if (!weights)
      throw ConfigError("weights: required by this command");
    return *weights;
  }
};

namespace scenario_detail {

using nlohmann::json;

inline std::string at(const std::string& ctx, const std::string& key)
{
  return ctx.empty() ? key : ctx + "." + key;
}

inline std::string at(const std::string& ctx, std::size_t i) { return ctx + "[" + std::to_string(i) + "]"; }

[[noreturn]] inline void fail(const std::string& ctx, const std::string& msg) { throw ConfigError(ctx + ": " + msg); }

inline void only_keys(const json& j, const std::string& ctx, std::initializer_list<const char*> allowed)
{
  if (!j.is_object())
    fail(ctx, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : j.items())
    if (!ok.count(k))
      fail(at(ctx, k), "unknown key");
}

inline double number(const json& j, const std::string& ctx)
{
  if (!j.is_number())
    fail(ctx, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x))
    fail(ctx, "must be finite");
  return x;
}

inline double positive(const json& j, const std::string& ctx)
{
  const double x = number(j, ctx);
  if (!(x > 0.0))
    fail(ctx, "must be positive");
  return x;
}

inline int integer(const json& j, const std::string& ctx)
{
  if (!j.is_number_integer())
    fail(ctx, "expected an integer");
  return j.get<int>();
}

inline double angle(const json& j, const std::string& ctx)
{
  if (j.is_object()) {
    only_keys(j, ctx, {"deg"});
    if (!j.contains("deg"))
      fail(ctx, "angle object needs 'deg'");
    return number(j["deg"], at(ctx, "deg")) * pi / 180.0;
  }
  return number(j, ctx);
}

inline const json& array(const json& j, const std::string& ctx, std::optional<std::size_t> size = {})
{
  if (!j.is_array())
    fail(ctx, "expected an array");
  if (size && j.size() != *size)
    fail(ctx, "expected " + std::to_string(*size) + " entries");
  return j;
}

inline std::array<double, 3> triple(const json& j, const std::string& ctx, bool angles = false)
{
  array(j, ctx, 3);
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i)
    out[i] = angles ? angle(j[i], at(ctx, i)) : number(j[i], at(ctx, i));
  return out;
}

inline std::string text(const json& j, const std::string& ctx)
{
  if (!j.is_string())
    fail(ctx, "expected a string");
  return j.get<std::string>();
}

inline ProfileSpec surface(const json& j, const std::string& ctx)
{
  only_keys(j, ctx, {"kind", "params", "samples", "u_min", "u_max", "axis_guard"});
  ProfileSpec s;
  if (!j.contains("kind"))
    fail(at(ctx, "kind"), "missing");
  s.kind = text(j["kind"], at(ctx, "kind"));
  if (j.contains("params")) {
    const auto& p = j["params"];
    if (!p.is_object())
      fail(at(ctx, "params"), "expected an object");
    for (const auto& [k, v] : p.items())
      s.params[k] = number(v, at(at(ctx, "params"), k));
  }
  if (j.contains("samples")) {
    const auto& a = array(j["samples"], at(ctx, "samples"));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto row = triple(a[i], at(at(ctx, "samples"), i));
      s.samples.push_back({row[0], row[1], row[2]});
    }
  }
  if (j.contains("u_min"))
    s.u_min = number(j["u_min"], at(ctx, "u_min"));
  if (j.contains("u_max"))
    s.u_max = number(j["u_max"], at(ctx, "u_max"));
  if (j.contains("axis_guard"))
    s.axis_guard = positive(j["axis_guard"], at(ctx, "axis_guard"));
  return s;
}

inline SurfacePoint raw_point(const json& j, const std::string& ctx)
{
  only_keys(j, ctx, {"u", "v"});
  if (!j.contains("u") || !j.contains("v"))
    fail(ctx, "point needs 'u' and 'v'");
  return {angle(j["u"], at(ctx, "u")), angle(j["v"], at(ctx, "v"))};
}

// A point given by name or inline.
inline SurfacePoint point_ref(const json& j, const std::string& ctx, const Scenario& sc)
{
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    auto it = sc.points.find(name);
    if (it == sc.points.end())
      fail(ctx, "unknown point '" + name + "'");
    return it->second;
  }
  return raw_point(j, ctx);
}

inline void check_on_chart(const ProfileSurface& S, const SurfacePoint& p, const std::string& ctx)
{
  try {
    S.require_on_chart(p);
  } catch (const ConfigError& e) {
    fail(ctx, e.what());
  }
}

inline void connect_options(const json& j, const std::string& ctx, ConnectOptions& c)
{
  only_keys(j, ctx, {"n_starts", "windings", "max_len", "resid_tol", "max_iter"});
  if (j.contains("n_starts"))
    c.n_starts = integer(j["n_starts"], at(ctx, "n_starts"));
  if (j.contains("windings")) {
    const auto& a = array(j["windings"], at(ctx, "windings"));
    c.windings.clear();
    for (std::size_t i = 0; i < a.size(); ++i)
      c.windings.push_back(integer(a[i], at(at(ctx, "windings"), i)));
  }
  if (j.contains("max_len"))
    c.max_len = positive(j["max_len"], at(ctx, "max_len"));
  if (j.contains("resid_tol"))
    c.resid_tol = positive(j["resid_tol"], at(ctx, "resid_tol"));
  if (j.contains("max_iter"))
    c.max_iter = integer(j["max_iter"], at(ctx, "max_iter"));
  try {
    c.validate();
  } catch (const ConfigError& e) {
    fail(ctx, e.what());
  }
}

inline void fermat_options(const json& j, const std::string& ctx, FermatOptions& f, const Scenario& sc)
{
  only_keys(j, ctx, {"grad_tol", "angle_tol", "max_iter", "max_halvings", "armijo", "start"});
  if (j.contains("grad_tol"))
    f.grad_tol = positive(j["grad_tol"], at(ctx, "grad_tol"));
  if (j.contains("angle_tol"))
    f.angle_tol = positive(j["angle_tol"], at(ctx, "angle_tol"));
  if (j.contains("max_iter"))
    f.max_iter = integer(j["max_iter"], at(ctx, "max_iter"));
  if (j.contains("max_halvings"))
    f.max_halvings = integer(j["max_halvings"], at(ctx, "max_halvings"));
  if (j.contains("armijo"))
    f.armijo = positive(j["armijo"], at(ctx, "armijo"));
  if (j.contains("start"))
    f.start = point_ref(j["start"], at(ctx, "start"), sc);
}

} // namespace scenario_detail

/// Parses and validates a scenario document. Every error is a ConfigError
/// whose message starts with the offending field path.
inline Scenario parse_scenario(const nlohmann::json& j)
{
  using namespace scenario_detail;
  only_keys(j, "scenario",
            {"schema", "description", "surface", "points", "weights", "options", "shots", "pairs", "terminals",
             "inverse", "theorem1", "rotation", "verify"});
  if (!j.contains("schema") || text(j["schema"], "schema") != scenario_schema)
    fail("schema", std::string("expected \"") + scenario_schema + "\"");

  Scenario sc;
  sc.digest = io::fnv1a64(j.dump());
  if (j.contains("description"))
    sc.description = text(j["description"], "description");

  if (!j.contains("surface"))
    fail("surface", "missing");
  sc.surface_spec = surface(j["surface"], "surface");
  std::optional<ProfileSurface> S;
  try {
    S = make_surface(sc.surface_spec);
  } catch (const ConfigError& e) {
    fail("surface", e.what());
  }

  if (j.contains("points")) {
    if (!j["points"].is_object())
      fail("points", "expected an object");
    for (const auto& [name, p] : j["points"].items()) {
      const auto ctx = at("points", name);
      sc.points[name] = raw_point(p, ctx);
      check_on_chart(*S, sc.points[name], ctx);
    }
  }

  if (j.contains("weights")) {
    const auto b = triple(j["weights"], "weights");
    for (std::size_t i = 0; i < 3; ++i)
      if (!(b[i] > 0.0))
        fail(at("weights", i), "must be positive");
    sc.weights = WeightTriple{b[0], b[1], b[2]};
  }

  if (j.contains("options")) {
    const auto& o = j["options"];
    only_keys(o, "options", {"tol", "connect", "fermat"});
    if (o.contains("tol"))
      sc.tol = positive(o["tol"], "options.tol");
    if (o.contains("connect"))
      connect_options(o["connect"], "options.connect", sc.connect);
    if (o.contains("fermat"))
      fermat_options(o["fermat"], "options.fermat", sc.fermat, sc);
  }
  sc.connect.tol = sc.tol;
  if (sc.fermat.start)
    check_on_chart(*S, *sc.fermat.start, "options.fermat.start");

  if (j.contains("shots")) {
    const auto& a = array(j["shots"], "shots");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto ctx = at("shots", i);
      only_keys(a[i], ctx, {"from", "heading", "length"});
      for (const char* k : {"from", "heading", "length"})
        if (!a[i].contains(k))
          fail(at(ctx, k), "missing");
      ShotSpec s{point_ref(a[i]["from"], at(ctx, "from"), sc), angle(a[i]["heading"], at(ctx, "heading")),
                 number(a[i]["length"], at(ctx, "length"))};
      if (s.length < 0.0)
        fail(at(ctx, "length"), "must be non-negative");
      check_on_chart(*S, s.from, at(ctx, "from"));
      sc.shots.push_back(s);
    }
  }

  if (j.contains("pairs")) {
    const auto& a = array(j["pairs"], "pairs");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto ctx = at("pairs", i);
      array(a[i], ctx, 2);
      std::array<std::string, 2> pr{text(a[i][0], at(ctx, 0)), text(a[i][1], at(ctx, 1))};
      for (std::size_t k = 0; k < 2; ++k)
        if (!sc.points.count(pr[k]))
          fail(at(ctx, k), "unknown point '" + pr[k] + "'");
      sc.pairs.push_back(pr);
    }
  }

  if (j.contains("terminals")) {
    array(j["terminals"], "terminals", 3);
    for (std::size_t k = 0; k < 3; ++k) {
      sc.terminals[k] = text(j["terminals"][k], at("terminals", k));
      if (!sc.points.count(sc.terminals[k]))
        fail(at("terminals", k), "unknown point '" + sc.terminals[k] + "'");
    }
  }

  if (j.contains("inverse")) {
    const auto& o = j["inverse"];
    only_keys(o, "inverse", {"angles", "sum"});
    if (!o.contains("angles"))
      fail("inverse.angles", "missing");
    InverseSpec in;
    in.angles = triple(o["angles"], "inverse.angles", true);
    if (o.contains("sum"))
      in.sum = positive(o["sum"], "inverse.sum");
    sc.inverse = in;
  }

  if (j.contains("theorem1")) {
    const auto& o = j["theorem1"];
    only_keys(o, "theorem1", {"alpha1", "rho0"});
    if (!o.contains("alpha1"))
      fail("theorem1.alpha1", "missing");
    Theorem1Spec t;
    t.alpha1 = angle(o["alpha1"], "theorem1.alpha1");
    if (o.contains("rho0"))
      t.rho0 = positive(o["rho0"], "theorem1.rho0");
    sc.theorem1 = t;
  }

  if (j.contains("rotation")) {
    const auto& o = j["rotation"];
    only_keys(o, "rotation", {"A0", "lengths", "theta0", "deltas"});
    for (const char* k : {"A0", "lengths", "deltas"})
      if (!o.contains(k))
        fail(at("rotation", k), "missing");
    RotationSpec r;
    r.A0 = point_ref(o["A0"], "rotation.A0", sc);
    check_on_chart(*S, r.A0, "rotation.A0");
    r.lengths = triple(o["lengths"], "rotation.lengths");
    for (std::size_t i = 0; i < 3; ++i)
      if (!(r.lengths[i] > 0.0))
        fail(at("rotation.lengths", i), "must be positive");
    if (o.contains("theta0"))
      r.theta0 = angle(o["theta0"], "rotation.theta0");
    const auto& d = array(o["deltas"], "rotation.deltas");
    if (d.empty())
      fail("rotation.deltas", "must not be empty");
    for (std::size_t i = 0; i < d.size(); ++i)
      r.deltas.push_back(angle(d[i], at("rotation.deltas", i)));
    sc.rotation = r;
  }

  if (j.contains("verify")) {
    const auto& o = j["verify"];
    only_keys(o, "verify", {"seed", "suites", "force_fail"});
    if (o.contains("seed")) {
      if (!o["seed"].is_number_unsigned())
        fail("verify.seed", "expected a non-negative integer");
      sc.verify.seed = o["seed"].get<std::uint64_t>();
    }
    if (o.contains("suites")) {
      const auto& a = array(o["suites"], "verify.suites");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const int id = integer(a[i], at("verify.suites", i));
        if (id < 1 || id > verify::suite_count)
          fail(at("verify.suites", i), "suite ids run from 1 to " + std::to_string(verify::suite_count));
        sc.verify.suites.push_back(id);
      }
    }
    if (o.contains("force_fail"))
      sc.verify.force_fail = integer(o["force_fail"], "verify.force_fail");
  }
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& file)
{
  std::ifstream in(file);
  if (!in)
    throw ConfigError("cannot open scenario " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario " + file.string() + ": " + e.what());
  }
  return parse_scenario(j);
}

} // namespace revgeo
