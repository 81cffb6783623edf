// Acceptance run: one line per criterion. Criteria 1-10 are the oracle
// suites; 11 drives the CLI verify command end to end.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "revgeo/verify.hpp"

#ifndef REVGEO_CLI
#error "REVGEO_CLI must name the CLI binary"
#endif

namespace {

int run_cli(const std::string& args)
{
  const std::string cmd = std::string(REVGEO_CLI) + " " + args + " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void line(int id, const std::string& name, bool ok, const std::string& detail)
{
  std::printf("criterion %2d %-24s %s  %s\n", id, name.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

} // namespace

int main()
{
  using namespace revgeo::verify;
  int failed = 0;

  for (int id = 1; id <= suite_count; ++id) {
    const auto r = run_suite(id);
    std::string detail;
    char buf[96];
    for (const auto& m : r.metrics) {
      std::snprintf(buf, sizeof buf, "%s=%.3g ", m.name.c_str(), m.value);
      detail += buf;
    }
    std::snprintf(buf, sizeof buf, "(%.1fs)", r.seconds);
    detail += buf;
    for (const auto& n : r.notes)
      detail += " [" + n + "]";
    line(id, r.name, r.passed, detail);
    failed += !r.passed;
  }

  // 11: exit 0 with every suite green inside five minutes, exit 3 on failure.
  const auto dir = std::filesystem::temp_directory_path() / "revgeo_acceptance";
  std::filesystem::create_directories(dir);
  const auto t0 = std::chrono::steady_clock::now();
  const int rc_ok = run_cli("verify --out " + (dir / "verify.json").string());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    std::ofstream f(dir / "forced.json");
    f << R"({"schema": "revgeo-scenario/1", "surface": {"kind": "sphere"},
             "verify": {"suites": [6, 8], "force_fail": 8}})";
  }
  const int rc_fail =
    run_cli("verify --scenario " + (dir / "forced.json").string() + " --out " + (dir / "forced_out.json").string());
  const bool ok11 = rc_ok == 0 && rc_fail == 3 && secs <= 300.0;
  char buf[128];
  std::snprintf(buf, sizeof buf, "exit=%d forced_failure_exit=%d runtime=%.1fs", rc_ok, rc_fail, secs);
  line(11, "verify-command", ok11, buf);
  failed += !ok11;

  std::printf("%d of 11 criteria passed\n", 11 - failed);
  return failed == 0 ? 0 : 1;
}
