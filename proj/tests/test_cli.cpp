#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hh/config.hpp"

using namespace hh::config;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = std::string("\"") + HH_CLI_PATH + "\" " + args;
  if (!stdout_file.empty()) cmd += " > \"" + stdout_file + "\"";
  cmd += " 2> /dev/null";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("hh_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path find_output(const fs::path& dir, const std::string& prefix, const std::string& ext) {
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix + "-", 0) == 0 && entry.path().extension() == "." + ext)
      return entry.path();
  }
  return {};
}

}  // namespace

TEST_CASE("config parsing round trip") {
  RunConfig cfg = RunConfig::parse(
      "# comment\n"
      "m = \"1+x\"   # profile\n"
      "alpha = 0.5\n"
      "l = 5\n"
      "quad.panels = 128\n"
      "alpha_range = 0:2:9\n"
      "allow_constant = true\n");
  CHECK(cfg.m == "1+x");
  CHECK(cfg.alpha == 0.5);
  REQUIRE(cfg.l);
  CHECK(*cfg.l == 5.0);
  CHECK(cfg.quad_panels == 128);
  REQUIRE(cfg.alpha_range);
  CHECK(cfg.alpha_range->count == 9);
  CHECK(cfg.allow_constant);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("unknown keys and malformed lines are rejected") {
  CHECK_THROWS_AS(RunConfig::parse("mm = \"1+x\"\n"), hh::ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("m \"1+x\"\n"), hh::ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("alpha = abc\n"), hh::ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("l_range = 1:2\n"), hh::ConfigError);
  try {
    RunConfig::parse("m = \"1+x\"\nbogus.key = 1\n");
    FAIL("expected ConfigError");
  } catch (const hh::ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("validation catches bad values") {
  RunConfig cfg = RunConfig::parse("m = \"1+x\"\n");
  cfg.alpha = -1.0;
  CHECK_THROWS_AS(cfg.validate(), hh::ConfigError);
  cfg = RunConfig::parse("m = \"1+x\"\n");
  cfg.grid_n = 4;
  CHECK_THROWS_AS(cfg.validate(), hh::ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("").validate(), hh::ConfigError);  // m missing
}

TEST_CASE("set overrides") {
  RunConfig cfg = RunConfig::parse("m = \"1+x\"\nalpha = 0\n");
  cfg.apply_set("alpha=1.5");
  CHECK(cfg.alpha == 1.5);
  cfg.apply_set("l_range=4:6:21");
  REQUIRE(cfg.l_range);
  CHECK(cfg.l_range->count == 21);
  CHECK_THROWS_AS(cfg.apply_set("nonsense"), hh::ConfigError);
  CHECK_THROWS_AS(cfg.apply_set("unknown.key=1"), hh::ConfigError);
}

TEST_CASE("hash covers results-relevant keys only") {
  RunConfig a = RunConfig::parse("m = \"1+x\"\nalpha = 0.5\nout = \"outA\"\n");
  RunConfig b = RunConfig::parse("m = \"1+x\"\nalpha = 0.5\nout = \"outB\"\n");
  CHECK(a.hash() == b.hash());
  RunConfig c = RunConfig::parse("m = \"1+x\"\nalpha = 0.6\n");
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("range points are inclusive and evenly spaced") {
  Range r{4.0, 6.0, 5};
  auto pts = r.points();
  REQUIRE(pts.size() == 5);
  CHECK(pts.front() == 4.0);
  CHECK(pts.back() == 6.0);
  CHECK(pts[2] == doctest::Approx(5.0));
}

TEST_CASE("cli: analyze emits the reduced-theory document") {
  fs::path dir = fresh_dir("analyze");
  fs::path cfgfile = dir / "run.cfg";
  write_file(cfgfile, "m = \"1+x\"\nalpha = 0\nr = 1\nout = \"" + (dir / "out").string() +
                          "\"\n");
  fs::path stdout_file = dir / "stdout.json";
  int rc = run_cli("analyze --config \"" + cfgfile.string() + "\"", stdout_file.string());
  CHECK(rc == 0);

  auto doc = nlohmann::json::parse(slurp(stdout_file));
  CHECK(std::fabs(doc["tilde_l"].get<double>() - 5.0 / 3.0) < 1e-6);
  CHECK(std::fabs(doc["l0"].get<double>() - 5.0) < 1e-6);
  CHECK(std::fabs(doc["nu0"].get<double>() - 1.0) < 1e-6);
  CHECK(std::fabs(doc["H"].get<double>() - 2.0 / 3.0) < 1e-6);
  CHECK(doc["alpha_star"] == "always");

  fs::path file_copy = find_output(dir / "out", "analyze", "json");
  REQUIRE(!file_copy.empty());
  CHECK(nlohmann::json::parse(slurp(file_copy)) == doc);
}

TEST_CASE("cli: analyze reports no Hopf point for m = x") {
  fs::path dir = fresh_dir("analyze_nohopf");
  fs::path cfgfile = dir / "run.cfg";
  write_file(cfgfile, "m = \"x\"\nout = \"" + (dir / "out").string() + "\"\n");
  fs::path stdout_file = dir / "stdout.json";
  int rc = run_cli("analyze --config \"" + cfgfile.string() + "\"", stdout_file.string());
  CHECK(rc == 0);
  auto doc = nlohmann::json::parse(slurp(stdout_file));
  CHECK(doc["alpha_star"] == "never");
  CHECK(doc["l0"].is_null());
}

TEST_CASE("cli: exit codes") {
  fs::path dir = fresh_dir("exitcodes");
  fs::path bad = dir / "bad.cfg";
  write_file(bad, "m = \"1+x\"\nbogus = 1\n");
  CHECK(run_cli("analyze --config \"" + bad.string() + "\"") == 2);

  fs::path constant = dir / "constant.cfg";
  write_file(constant, "m = \"2\"\n");  // violates (H1), no allow_constant
  CHECK(run_cli("analyze --config \"" + constant.string() + "\"") == 2);

  fs::path nohopf = dir / "nohopf.cfg";
  write_file(nohopf, "m = \"x\"\nlambda = 0.01\nout = \"" + (dir / "out").string() + "\"\n");
  CHECK(run_cli("hopf --config \"" + nohopf.string() + "\"") == 3);

  CHECK(run_cli("analyze --config \"" + (dir / "missing.cfg").string() + "\"") == 2);
}

TEST_CASE("cli: sweep is deterministic and byte-identical across job counts") {
  fs::path dir = fresh_dir("sweep");
  auto cfg_text = [&](const std::string& out) {
    return "m = \"1+x\"\nr = 1\nalpha_range = 0:1:3\nl_range = 2:6:4\nout = \"" + out +
           "\"\n";
  };
  fs::path cfg1 = dir / "a.cfg";
  write_file(cfg1, cfg_text((dir / "out1").string()));
  fs::path cfg2 = dir / "b.cfg";
  write_file(cfg2, cfg_text((dir / "out2").string()));

  CHECK(run_cli("sweep --config \"" + cfg1.string() + "\" --jobs 1") == 0);
  CHECK(run_cli("sweep --config \"" + cfg2.string() + "\" --jobs 4") == 0);

  fs::path csv1 = find_output(dir / "out1", "sweep", "csv");
  fs::path csv2 = find_output(dir / "out2", "sweep", "csv");
  REQUIRE(!csv1.empty());
  REQUIRE(!csv2.empty());
  std::string bytes1 = slurp(csv1);
  CHECK(bytes1 == slurp(csv2));

  // pinned schema header
  CHECK(bytes1.rfind("alpha,l,tilde_l,c0,q0,S,trace,det,re_mu_over_lambda,im_mu_over_"
                     "lambda,classification\r\n",
                     0) == 0);

  // rerun into the same directory produces identical bytes
  CHECK(run_cli("sweep --config \"" + cfg1.string() + "\" --jobs 2") == 0);
  CHECK(slurp(csv1) == bytes1);

  // companion gnuplot script exists and references the csv
  fs::path gp = find_output(dir / "out1", "sweep", "gp");
  REQUIRE(!gp.empty());
  CHECK(slurp(gp).find(csv1.filename().string()) != std::string::npos);
}

TEST_CASE("cli: single-point sweep matches analyze") {
  fs::path dir = fresh_dir("single");
  fs::path cfgfile = dir / "run.cfg";
  write_file(cfgfile, "m = \"1+x\"\nalpha = 0.5\nl = 4\nout = \"" + (dir / "out").string() +
                          "\"\n");
  fs::path aout = dir / "analyze.json";
  REQUIRE(run_cli("analyze --config \"" + cfgfile.string() + "\"", aout.string()) == 0);
  REQUIRE(run_cli("sweep --config \"" + cfgfile.string() + "\"") == 0);

  auto doc = nlohmann::json::parse(slurp(aout));
  fs::path csv = find_output(dir / "out", "sweep", "csv");
  REQUIRE(!csv.empty());

  std::istringstream in(slurp(csv));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 11);
  CHECK(std::stod(cells[0]) == 0.5);
  CHECK(std::stod(cells[1]) == 4.0);
  CHECK(std::fabs(std::stod(cells[2]) - doc["tilde_l"].get<double>()) < 1e-12);
}

TEST_CASE("cli: ode-sim writes the trajectory schema") {
  fs::path dir = fresh_dir("odesim");
  fs::path cfgfile = dir / "run.cfg";
  write_file(cfgfile,
             "m = \"1+x\"\nl = 4\nquad.panels = 64\node.t_end = 50\node.dt = 0.002\nout = "
             "\"" +
                 (dir / "out").string() + "\"\n");
  fs::path stdout_file = dir / "summary.json";
  REQUIRE(run_cli("ode-sim --config \"" + cfgfile.string() + "\"", stdout_file.string()) == 0);
  auto doc = nlohmann::json::parse(slurp(stdout_file));
  CHECK(doc.contains("attractor"));

  fs::path csv = find_output(dir / "out", "ode-sim", "csv");
  REQUIRE(!csv.empty());
  CHECK(slurp(csv).rfind("t,u,v\r\n", 0) == 0);
}

TEST_CASE("cli: spectrum at lambda = 0 has a double zero eigenvalue") {
  fs::path dir = fresh_dir("spectrum0");
  fs::path cfgfile = dir / "run.cfg";
  write_file(cfgfile, "m = \"1+x\"\nlambda = 0\nl = 4\ngrid.n = 32\nout = \"" +
                          (dir / "out").string() + "\"\n");
  fs::path stdout_file = dir / "spec.json";
  REQUIRE(run_cli("spectrum --config \"" + cfgfile.string() + "\"", stdout_file.string()) ==
          0);
  auto doc = nlohmann::json::parse(slurp(stdout_file));
  CHECK(std::fabs(doc["rightmost_re"].get<double>()) < 1e-9);

  fs::path csv = find_output(dir / "out", "spectrum", "csv");
  REQUIRE(!csv.empty());
  std::istringstream in(slurp(csv));
  std::string header, first, second;
  std::getline(in, header);
  CHECK(header == "re,im\r");
  std::getline(in, first);
  std::getline(in, second);
  CHECK(std::fabs(std::stod(first)) < 1e-9);
  CHECK(std::fabs(std::stod(second)) < 1e-9);
}
