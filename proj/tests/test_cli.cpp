#include "doctest.h"

#include "heisenbundle/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hb;

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hb_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string echo_of(const RunConfig& c, const std::string& key) {
  for (const auto& [k, v] : c.echo)
    if (k == key) return v;
  return "<missing>";
}

} // namespace

TEST_CASE("parse a framecheck command line") {
  RunConfig c = parse_config(split("framecheck --d 1 --lattice 0.5,0,0,1 --window gaussian"));
  CHECK(c.command == Command::FrameCheck);
  CHECK(c.d == 1);
  CHECK(c.lattice(0, 0) == 0.5);
  CHECK(c.lattice(1, 1) == 1.0);
  CHECK(c.tol == 1e-3);
  CHECK(echo_of(c, "box-max") == "64");
  CHECK(echo_of(c, "out") == "<missing>");
}

TEST_CASE("usage errors") {
  CHECK_THROWS_AS(parse_config(split("framecheck --d 1 --window gaussian")), UsageError);
  CHECK_THROWS_AS(parse_config(split("framecheck --lattice 1,0,0")), UsageError);
  CHECK_THROWS_AS(parse_config(split("framecheck --lattice 1,0,0,x")), UsageError);
  CHECK_THROWS_AS(parse_config(split("framecheck --lattice 1,0,0,1 --window box")), UsageError);
  CHECK_THROWS_AS(parse_config(split("framecheck --lattice 1,0,0,1 --tol -1")), UsageError);
  CHECK_THROWS_AS(parse_config(split("framecheck --lattice 1,0,0,1 --frobnicate 2")), UsageError);
  CHECK_THROWS_AS(parse_config(split("transmogrify --lattice 1,0,0,1")), UsageError);
  CHECK_THROWS_AS(parse_config(split("holder --lattice 1,0,0,1 --t 0.1,0.2")), UsageError);
  CHECK_THROWS_AS(parse_config(split("deformbound --theta 0,1,-1,0")), UsageError);
  CHECK_NOTHROW(parse_config(split("framecheck --lattice 1,0,0,1 --window hermite:3")));
}

TEST_CASE("config file values and overriding flags") {
  auto dir = scratch("config");
  auto file = (dir / "run.cfg").string();
  std::ofstream(file) << "# sweep setup\nlattice = 0.5, 0, 0, 1\ntol = 0.002\nseed = 9\n";
  RunConfig c = parse_config({"framecheck", "--config", file, "--tol", "0.004"});
  CHECK(c.tol == 0.004);
  CHECK(c.seed == 9);
  CHECK(c.lattice(0, 0) == 0.5);
  CHECK(echo_of(c, "tol") == "0.004");

  std::ofstream(file) << "lattice = 1,0,0,1\nlatice = 2\n";
  CHECK_THROWS_AS(parse_config({"framecheck", "--config", file}), UsageError);
  std::ofstream(file) << "tol = 1\ntol = 2\n";
  CHECK_THROWS_AS(parse_config({"framecheck", "--config", file}), UsageError);
  std::ofstream(file) << "lattice 1,0,0,1\n";
  CHECK_THROWS_AS(parse_config({"framecheck", "--config", file}), UsageError);
  CHECK_THROWS_AS(parse_config({"framecheck", "--config", (dir / "absent.cfg").string()}), UsageError);
}

TEST_CASE("framecheck reports") {
  RunOutput dense = execute(parse_config(split("framecheck --lattice 0.5,0,0,1")));
  CHECK(dense.exitCode == 0);
  const Json& f = dense.report["result"]["frame"];
  for (const char* k : {"lattice", "det", "bessel", "lower", "certified", "neumann_rate", "box_radius", "tol"})
    CHECK(f.contains(k));
  CHECK(f["certified"] == true);
  CHECK(dense.report["config"]["lattice"] == "0.5,0,0,1");
  CHECK(dense.files.count("framecheck.json"));
  CHECK(dense.files.at("framecheck.txt").find("result.frame.certified: true\n") != std::string::npos);

  RunOutput crit = execute(parse_config(split("framecheck --lattice 1,0,0,1")));
  CHECK(crit.exitCode == 0);
  CHECK(crit.report["result"]["frame"]["certified"] == false);
}

TEST_CASE("exit codes and written files") {
  CHECK(exit_code(ErrorKind::NoConvergence) == 3);
  CHECK(exit_code(ErrorKind::NotAFrame) == 4);
  CHECK(exit_code(ErrorKind::ParseError) == 2);

  auto dir = scratch("run");
  std::ostringstream out, err;
  RunConfig bad = parse_config(split("dualwindow --lattice 1,0,0,1"));
  bad.out = dir.string();
  CHECK(run(bad, out, err) == 4);
  CHECK(err.str().find("NotAFrame") != std::string::npos);

  RunConfig good = parse_config(split("wexlerraz --lattice 0.5,0,0,1"));
  good.out = (dir / "a").string();
  CHECK(run(good, out, err) == 0);
  RunOutput again = execute(good);
  CHECK(again.report["result"]["wexler_raz_residual"].get<double>() < 1e-6);
  for (const auto& [name, content] : again.files) {
    std::ifstream f(dir / "a" / name, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == content);
  }
}

TEST_CASE("identical configs give identical tables") {
  RunConfig c = parse_config(split("balianlow --lattice 0,0,0,1 --direction 1,0,0,0 --t 0.8,0.9,1 --seed 4"));
  RunOutput a = execute(c), b = execute(c);
  CHECK(a.files == b.files);
  CHECK(a.files.at("balianlow.csv").rfind("t,det,lower_estimate,bessel,certified,converged\n", 0) == 0);
}

TEST_CASE("report text and tables") {
  Json doc;
  doc["a"] = 1;
  doc["b"]["c"] = "x y";
  doc["b"]["d"] = Json::array({1, 2});
  CHECK(report_text(doc) == "a: 1\nb.c: x y\nb.d: [1,2]\n");
  Table t{{"p", "q"}, {{"1", "2"}}};
  CHECK(t.csv() == "p,q\n1,2\n");
  t.rows.push_back({"3"});
  CHECK_THROWS_AS(t.csv(), Error);
  CHECK(fmt_num(0.1) == "0.1");
}
