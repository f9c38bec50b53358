#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "nfres/cli.hpp"

using nfres::cli::run;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

double grab(const std::string& text, const std::string& name) {
  const std::regex re("out\\." + name + " = ([-+0-9.eE]+)");
  std::smatch m;
  REQUIRE_MESSAGE(std::regex_search(text, m, re), "missing output ", name, " in:\n", text);
  return std::stod(m[1]);
}

std::string temp_dir() {
  auto p = std::filesystem::temp_directory_path() / "nfres_cli_test";
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_CASE("invert subcommand prints the paper values") {
  const auto r = invoke({"invert", "--finesse", "29.4", "--peak", "0.14"});
  REQUIRE(r.code == 0);
  CHECK(grab(r.out, "mirror_reflectivity") == doctest::Approx(0.96).epsilon(0.006));
  CHECK(grab(r.out, "single_pass_transmission") == doctest::Approx(0.93).epsilon(0.011));

  const auto pre = invoke({"invert", "--finesse", "177.7", "--assume-tc-unity"});
  REQUIRE(pre.code == 0);
  CHECK(grab(pre.out, "mirror_reflectivity") == doctest::Approx(0.98).epsilon(0.0052));
}

TEST_CASE("thermo subcommand") {
  const auto r = invoke({"thermo", "--li", "852.5555e-9", "--lf", "851.8944e-9", "--ti",
                         "295", "--tf", "4.6"});
  REQUIRE(r.code == 0);
  CHECK(grab(r.out, "kappa_avg_per_K") == doctest::Approx(2.12e-6).epsilon(1e-2));
  CHECK(grab(r.out, "dn_over_n") == doctest::Approx(-6.157e-4).epsilon(1e-3));
}

TEST_CASE("modes subcommand reports the cutoff") {
  const auto r = invoke({"modes", "--diameter", "500e-9", "--at", "852e-9"});
  REQUIRE(r.code == 0);
  CHECK(grab(r.out, "single_mode_cutoff_nm") == doctest::Approx(691.0).epsilon(5.0 / 691.0));
  CHECK(grab(r.out, "n_eff") == doctest::Approx(1.14399).epsilon(1e-5));
  CHECK(grab(r.out, "single_mode") == 1.0);
}

TEST_CASE("every numeric output line carries a unit suffix") {
  const auto r = invoke({"cqed", "--q", "9.9e6", "--volume-lambda3", "4.9e4"});
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  const std::regex out_line("^out\\.[a-z0-9_]+ = [-+0-9.eE]+( \\+- [-+0-9.eE]+)? \\S+$");
  int checked = 0;
  while (std::getline(is, line)) {
    if (line.rfind("out.", 0) == 0) {
      CHECK_MESSAGE(std::regex_match(line, out_line), "line lacks a unit: ", line);
      ++checked;
    }
  }
  CHECK(checked >= 7);
}

TEST_CASE("simulate then fit: pipeline compatibility and exit codes") {
  const std::string dir = temp_dir();
  const std::string scan_path = dir + "/scan.txt";
  const auto sim = invoke({"simulate", "--out", scan_path, "--points", "700"});
  REQUIRE(sim.code == 0);

  const auto fit = invoke({"fit", "--in", scan_path});
  REQUIRE(fit.code == 0);
  // Default config synthesizes the reference cavity: F ~ 29.4 before noise.
  CHECK(grab(fit.out, "finesse") == doctest::Approx(29.4).epsilon(0.15));

  SUBCASE("empty file is a validation error, exit 2") {
    const std::string empty = dir + "/empty.txt";
    std::ofstream(empty).close();
    const auto r = invoke({"fit", "--in", empty});
    CHECK(r.code == 2);
    CHECK(r.err.find("8") != std::string::npos);  // "need at least 8"
  }
  SUBCASE("unknown subcommand exits 2 with usage") {
    const auto r = invoke({"frobnicate"});
    CHECK(r.code == 2);
  }
  SUBCASE("missing required flag exits 2") {
    const auto r = invoke({"invert"});
    CHECK(r.code == 2);
  }
}

TEST_CASE("infeasible inversion exits 3") {
  const auto r = invoke({"invert", "--finesse", "1e9", "--peak", "0.99"});
  CHECK(r.code == 3);
  CHECK(!r.err.empty());
}

TEST_CASE("report is deterministic across runs") {
  const std::string dir = temp_dir();
  const auto r1 = invoke({"--report", dir + "/r1.txt", "report", "--outdir", dir,
                          "--no-plots", "--no-pipeline"});
  REQUIRE_MESSAGE(r1.code == 0, r1.err);
  const auto r2 = invoke({"--report", dir + "/r2.txt", "report", "--outdir", dir,
                          "--no-plots", "--no-pipeline"});
  REQUIRE(r2.code == 0);

  auto scalars = [](const std::string& path) {
    std::ifstream f(path);
    std::string line, acc;
    while (std::getline(f, line)) {
      if (line.rfind("out.", 0) == 0) acc += line + "\n";
    }
    return acc;
  };
  const auto s1 = scalars(dir + "/r1.txt");
  const auto s2 = scalars(dir + "/r2.txt");
  CHECK(!s1.empty());
  CHECK(s1 == s2);
}

TEST_CASE("config file controls the toolkit") {
  const std::string dir = temp_dir();
  const std::string cfg_path = dir + "/toolkit.cfg";
  {
    std::ofstream f(cfg_path);
    f << "[fiber]\nradius_nm = 200\n\n[cavity]\nfsr_ghz = 2.0\n";
  }
  const auto r = invoke({"--config", cfg_path, "modes", "--at", "852e-9"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  // Thinner fiber: lower cutoff than the 500 nm reference.
  CHECK(grab(r.out, "single_mode_cutoff_nm") < 600.0);

  SUBCASE("bad config exits 2") {
    const std::string bad = dir + "/bad.cfg";
    std::ofstream(bad) << "[fiber]\nradius_nm = -5\n";
    const auto rb = invoke({"--config", bad, "modes"});
    CHECK(rb.code == 2);
  }
}
