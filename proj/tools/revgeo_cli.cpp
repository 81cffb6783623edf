// revgeo command line front end.
//
//   revgeo <command> --scenario <file> [--out <file>] [--paths <dir>] [--threads N]
//
// Exit codes: 0 ok, 1 configuration error, 2 numerical failure, 3 verify failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "revgeo/revgeo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace revgeo;

namespace {

enum Exit
{
  exit_ok = 0,
  exit_config = 1,
  exit_numerical = 2,
  exit_verify = 3
};

const std::vector<std::string> commands{"shoot",           "connect",           "fermat-solve", "fermat-inverse",
                                        "clairaut-report", "rotate-experiment", "verify"};

struct Run
{
  const Scenario* sc = nullptr;
  std::optional<fs::path> paths;
  json results = json::object();
  json warnings = json::array();
  json timing = json::object();
  bool verify_failed = false;

  void warn(const std::string& code, const std::string& msg) { warnings.push_back({{"code", code}, {"message", msg}}); }

  void csv(const std::string& name, const ProfileSurface& S, const GeodesicPath& g)
  {
    if (paths)
      io::write_path_csv(*paths / name, S, g);
  }
};

const Scenario& need(const Run& r)
{
  if (!r.sc)
    throw ConfigError("--scenario is required for this command");
  return *r.sc;
}

void cmd_shoot(Run& r)
{
  const auto& sc = need(r);
  if (sc.shots.empty())
    throw ConfigError("shots: required by this command");
  const auto S = sc.surface();
  json out = json::array();
  for (std::size_t i = 0; i < sc.shots.size(); ++i) {
    const auto& s = sc.shots[i];
    const auto g = shoot(S, s.from, s.heading, s.length, {sc.tol});
    out.push_back({{"from", io::point(s.from)}, {"heading", s.heading}, {"length", s.length}, {"path", io::path(S, g)}});
    r.csv("shot_" + std::to_string(i + 1) + ".csv", S, g);
  }
  r.results["shots"] = out;
}

void cmd_connect(Run& r)
{
  const auto& sc = need(r);
  if (sc.pairs.empty())
    throw ConfigError("pairs: required by this command");
  const auto S = sc.surface();
  json out = json::array();
  for (std::size_t i = 0; i < sc.pairs.size(); ++i) {
    const auto& [a, b] = sc.pairs[i];
    const auto c = connect_geodesic(S, sc.point(a), sc.point(b), sc.connect);
    if (c.ambiguous)
      r.warn("ambiguous", a + " -> " + b + ": another geodesic is within 1e-6 in length");
    out.push_back({{"from", a}, {"to", b}, {"connection", io::connection(S, c)}});
    r.csv("connect_" + std::to_string(i + 1) + ".csv", S, c.path);
  }
  r.results["connections"] = out;
}

FermatResult solve(Run& r, const ProfileSurface& S)
{
  const auto& sc = need(r);
  const auto& b = sc.require_weights();
  const auto pts = sc.terminal_points();
  const auto fl = floating_test(S, pts, b, sc.fermat.connect);
  r.results["terminals"] = {sc.terminals[0], sc.terminals[1], sc.terminals[2]};
  r.results["weights"] = io::triple(b);
  r.results["floating"] = io::floating(fl);
  const auto res = solve_fermat(S, pts, b, sc.fermat);
  for (const auto& w : res.warnings)
    r.warn("fermat", w);
  r.results["solution"] = io::fermat(S, res);
  for (int i = 0; i < 3; ++i)
    r.csv("branch_" + std::to_string(i + 1) + ".csv", S, res.branches[i].path);
  return res;
}

void cmd_fermat_solve(Run& r) { solve(r, need(r).surface()); }

void cmd_fermat_inverse(Run& r)
{
  const auto& sc = need(r);
  if (!sc.inverse && !sc.weights)
    throw ConfigError("inverse: this command needs 'inverse' or 'weights'");
  if (sc.inverse) {
    const auto b = inverse_weights(sc.inverse->angles, sc.inverse->sum);
    r.results["from_angles"] = {{"angles", io::triple(sc.inverse->angles)},
                                {"sum", sc.inverse->sum},
                                {"weights", io::triple(b)}};
  }
  if (sc.weights) {
    const auto phi = lemma2_angles(*sc.weights);
    r.results["from_weights"] = {{"weights", io::triple(*sc.weights)},
                                 {"angles", io::triple(phi)},
                                 {"round_trip", io::triple(inverse_weights(phi, sc.weights->sum()))}};
  }
}

void cmd_clairaut_report(Run& r)
{
  const auto& sc = need(r);
  const auto S = sc.surface();
  const auto& b = sc.require_weights();
  const auto res = solve(r, S);
  if (res.mode != FermatMode::interior)
    throw DomainError("clairaut-report: the optimum sits at terminal " + std::to_string(res.vertex + 1) +
                      ", there is no interior tree");
  const std::array<GeodesicPath, 3> br{res.branches[0].path, res.branches[1].path, res.branches[2].path};
  const auto rep = branch_report(S, res.A0, br, b);
  r.results["clairaut"] = io::clairaut(rep);
  r.results["sine_rule"] = io::sine_rule(sine_rule_diameter(b));
  if (S.is_sphere()) {
    try {
      const auto t2 = theorem2_ratios(S, rep, b);
      if (!t2.positivity)
        r.warn("theorem2-positivity", "not all sine constants are positive; the ratio claim does not apply");
      r.results["theorem2"] = io::theorem2(t2);
    } catch (const DomainError& e) {
      r.warn("theorem2", e.what());
    }
  }
  if (sc.theorem1) {
    const auto t1 = theorem1_constants(b, sc.theorem1->alpha1, sc.theorem1->rho0);
    if (!t1.in_window)
      r.warn("theorem1-window", "alpha1 lies outside (pi/2, pi)");
    r.results["theorem1_constants"] = io::theorem1(t1);
  }
}

void cmd_rotate(Run& r)
{
  const auto& sc = need(r);
  if (!sc.rotation)
    throw ConfigError("rotation: required by this command");
  const auto S = sc.surface();
  const auto& rot = *sc.rotation;
  const auto ex =
    rotate_tree_experiment(S, rot.A0, sc.require_weights(), rot.lengths, rot.theta0, rot.deltas, sc.connect);
  r.results["rotation"] = io::rotation(ex);
  for (std::size_t k = 0; k < ex.steps.size(); ++k)
    for (int i = 0; i < 3; ++i)
      r.csv("rotation_" + std::to_string(k + 1) + "_branch_" + std::to_string(i + 1) + ".csv", S,
            ex.steps[k].branches[i]);
}

void cmd_verify(Run& r, unsigned threads)
{
  verify::VerifyOptions opts = r.sc ? r.sc->verify : verify::VerifyOptions{};
  opts.threads = threads;
  json suites = json::array(), secs = json::object();
  bool all = true;
  verify::run_all(opts, [&](const verify::SuiteResult& s) {
    std::cerr << (s.passed ? "PASS " : "FAIL ") << s.id << " " << s.name << "\n";
    suites.push_back(io::suite(s));
    secs[s.name] = s.seconds;
    all = all && s.passed;
  });
  r.results["seed"] = opts.seed;
  r.results["suites"] = suites;
  r.results["passed"] = all;
  r.timing["suite_seconds"] = secs;
  r.verify_failed = !all;
}

void emit(const json& report, const std::optional<fs::path>& out)
{
  const std::string text = report.dump(2) + "\n";
  if (!out) {
    std::cout << text;
    return;
  }
  std::ofstream f(*out);
  f << text;
  if (!f)
    throw ConfigError("cannot write " + out->string());
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Geodesics, weighted Fermat trees and Clairaut analysis on surfaces of revolution"};
  std::string command, scenario_file, out_file, paths_dir;
  unsigned threads = 1;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(commands));
  app.add_option("--scenario", scenario_file, "Scenario JSON file");
  app.add_option("--out", out_file, "Write the JSON report here instead of stdout");
  app.add_option("--paths", paths_dir, "Directory for CSV polylines");
  app.add_option("--threads", threads, "Worker threads for multi-start searches")->check(CLI::Range(1u, 256u));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  const auto t0 = std::chrono::steady_clock::now();
  json report{{"format", io::format_version}, {"command", command}, {"conventions", io::conventions()}};
  const std::optional<fs::path> out = out_file.empty() ? std::nullopt : std::optional<fs::path>(out_file);

  Run run;
  std::optional<Scenario> sc;
  int rc = exit_ok;
  try {
    if (!scenario_file.empty()) {
      sc = load_scenario(scenario_file);
      sc->connect.threads = threads;
      sc->fermat.connect = sc->connect;
      run.sc = &*sc;
      report["scenario"] = {{"digest", "fnv1a64:" + sc->digest}, {"description", sc->description}};
    }
    if (!paths_dir.empty()) {
      run.paths = fs::path(paths_dir);
      fs::create_directories(*run.paths);
    }
    if (command == "shoot")
      cmd_shoot(run);
    else if (command == "connect")
      cmd_connect(run);
    else if (command == "fermat-solve")
      cmd_fermat_solve(run);
    else if (command == "fermat-inverse")
      cmd_fermat_inverse(run);
    else if (command == "clairaut-report")
      cmd_clairaut_report(run);
    else if (command == "rotate-experiment")
      cmd_rotate(run);
    else
      cmd_verify(run, threads);
    rc = run.verify_failed ? exit_verify : exit_ok;
  } catch (const ConfigError& e) {
    report["error"] = {{"kind", "config"}, {"message", e.what()}};
    rc = exit_config;
  } catch (const NumericalError& e) {
    report["error"] = {{"kind", "numerical"}, {"message", e.what()}};
    rc = exit_numerical;
  } catch (const fs::filesystem_error& e) {
    report["error"] = {{"kind", "config"}, {"message", e.what()}};
    rc = exit_config;
  }

  static const char* status[] = {"ok", "config_error", "numerical_failure", "verify_failed"};
  report["status"] = status[rc];
  report["exit_code"] = rc;
  report["results"] = run.results;
  report["warnings"] = run.warnings;
  run.timing["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report["timing"] = run.timing;
  if (report.contains("error"))
    std::cerr << "revgeo: " << report["error"]["message"].get<std::string>() << "\n";

  try {
    emit(report, out);
  } catch (const ConfigError& e) {
    std::cerr << "revgeo: " << e.what() << "\n";
    return exit_config;
  }
  return rc;
}
