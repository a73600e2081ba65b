#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include <json.hpp>

#include "cli.hpp"
#include "geomflow/errors.hpp"
#include "geomflow/snapshot_io.hpp"

using namespace geomflow;
namespace fs = std::filesystem;

static int tool(std::vector<std::string> args) {
  args.insert(args.begin(), "geomflow");
  return cli::main(args);
}

static std::string capture(const std::string& args) {
  std::string cmd = std::string(GEOMFLOW_TOOL) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[256];
  while (fgets(buf, sizeof buf, p)) out += buf;
  pclose(p);
  return out;
}

static fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

static nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

TEST_CASE("number parsing") {
  CHECK(cli::parse_real("1/1280") == 1.0 / 1280);
  CHECK(cli::parse_real("0.25") == 0.25);
  CHECK(cli::parse_real("2") == 2.0);
  CHECK(std::isinf(cli::parse_real("inf")));
  CHECK_THROWS_AS(cli::parse_real("abc"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_real("1/0"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_real("1/2/3"), InvalidArgument);
}

TEST_CASE("configuration errors exit with 2") {
  auto d = fresh_dir("geomflow_cli_cfg");
  CHECK(tool({"run", "--shape", "circle", "--n", "64", "--tau", "0.01", "--t-end", "0.1"}) == 2);
  CHECK(tool({"run", "--flow", "csf", "--shape", "circle", "--n", "64", "--tau", "0.03", "--t-end", "0.1",
              "--out", d.string()}) == 2);
  CHECK(tool({"run", "--flow", "mcf", "--shape", "circle", "--n", "64", "--tau", "0.01", "--t-end", "0.1",
              "--out", d.string()}) == 2);
  CHECK(tool({"run", "--flow", "csf", "--shape", "blob", "--n", "64", "--tau", "0.01", "--t-end", "0.1",
              "--out", d.string()}) == 2);
  CHECK(tool({"bogus"}) == 2);
  CHECK(tool({"run", "--config", (d / "missing.toml").string()}) == 2);
}

TEST_CASE("run writes snapshots, diagnostics, config echo and manifest") {
  auto d = fresh_dir("geomflow_cli_run");
  REQUIRE(tool({"run", "--flow", "csf", "--shape", "circle", "--n", "128", "--tau", "1/1000", "--t-end", "1/4",
                "--snapshot-times", "0,1/8", "--out", d.string()}) == 0);
  CHECK(fs::exists(d / "snapshot_000000.csv"));
  CHECK(fs::exists(d / "snapshot_000125.csv"));
  CHECK(fs::exists(d / "snapshot_000250.csv"));
  auto final_ = read_snapshot(d / "snapshot_000250.csv");
  CHECK(final_.time == doctest::Approx(0.25));
  CHECK(enclosed_area(final_.curve) == doctest::Approx(std::numbers::pi * 0.5).epsilon(1e-3));
  auto m = read_json(d / "manifest.json");
  CHECK(m["command"] == "run");
  CHECK(m["realized"]["N"] == 128);
  CHECK(m["realized"]["mr_count"] == 0);
  for (auto& f : m["outputs"]) CHECK(fs::exists(f.get<std::string>()));
  std::ifstream diag(d / "diagnostics.csv");
  std::string header;
  std::getline(diag, header);
  CHECK(header == "t,dA,L_ratio,Psi,mr_count");

  SUBCASE("the echoed config reproduces the run bit for bit") {
    auto d2 = fresh_dir("geomflow_cli_rerun");
    REQUIRE(tool({"run", "--config", (d / "run.toml").string(), "--out", d2.string()}) == 0);
    CHECK(read_snapshot(d2 / "snapshot_000250.csv").curve == final_.curve);
    CHECK(fs::exists(d2 / "snapshot_000125.csv"));
  }
}

TEST_CASE("precedence: config file, then environment, then flags") {
  auto d = fresh_dir("geomflow_cli_prec");
  {
    std::ofstream cfg(d / "c.toml");
    cfg << "flow = \"csf\"\nshape = \"circle\"\nn = 40\ntau = \"1/100\"\nt-end = \"1/10\"\nformat = \"json\"\n"
        << "out = \"" << (d / "from_config").string() << "\"\n";
  }
  auto realized_n = [&](const fs::path& out) { return read_json(out / "manifest.json")["realized"]["N"].get<int>(); };

  REQUIRE(tool({"run", "--config", (d / "c.toml").string()}) == 0);
  CHECK(realized_n(d / "from_config") == 40);
  CHECK(fs::exists(d / "from_config" / "snapshot_000010.json"));

  setenv("GEOMFLOW_N", "50", 1);
  setenv("GEOMFLOW_OUT", (d / "from_env").c_str(), 1);
  REQUIRE(tool({"run", "--config", (d / "c.toml").string()}) == 0);
  CHECK(realized_n(d / "from_env") == 50);

  REQUIRE(tool({"run", "--config", (d / "c.toml").string(), "--n", "60", "--out", (d / "from_flag").string()}) == 0);
  CHECK(realized_n(d / "from_flag") == 60);
  unsetenv("GEOMFLOW_N");
  unsetenv("GEOMFLOW_OUT");
}

TEST_CASE("solver failure exits with 3") {
  auto d = fresh_dir("geomflow_cli_fail");
  // an almost flat ellipse has a numerically singular normal matrix
  CHECK(tool({"run", "--flow", "csf", "--shape", "ellipse", "--ellipse-b", "1e-12", "--n", "40", "--tau", "0.1",
              "--t-end", "1", "--out", d.string()}) == 3);
  auto m = read_json(d / "manifest.json");
  CHECK(m["failure"].get<std::string>().find("step 0") != std::string::npos);
}

TEST_CASE("metric command") {
  auto d = fresh_dir("geomflow_cli_metric");
  PolygonalCurve sq({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  write_snapshot(d / "a.csv", sq, 0.0);
  write_snapshot(d / "b.json", translated(sq, {0.5, 0}), 0.0);
  PolygonalCurve tri({{0, 0}, {0, 1}, {1, 0}});
  write_snapshot(d / "c.csv", tri, 0.0);
  auto a = (d / "a.csv").string(), b = (d / "b.json").string(), c = (d / "c.csv").string();

  CHECK(std::stod(capture("metric " + a + " " + b + " --kind manifold")) == doctest::Approx(1.0));
  CHECK(std::stod(capture("metric " + a + " " + b + " --kind hausdorff")) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::stod(capture("metric " + a + " " + b + " --kind l2")) == doctest::Approx(0.5));
  CHECK(tool({"metric", a, c, "--kind", "linf"}) == 4);
  CHECK(tool({"metric", a, c, "--kind", "manifold"}) == 0);
  CHECK(tool({"metric", a, (d / "nope.csv").string()}) == 2);
  CHECK(tool({"metric", a, b, "--kind", "l7"}) == 2);
}

TEST_CASE("shapes and version") {
  auto out = capture("shapes");
  for (auto name : {"circle", "ellipse", "tube", "flower", "nonconvex"}) CHECK(out.find(name) != std::string::npos);
  CHECK(capture("--version").find("0.1.0") != std::string::npos);
}

TEST_CASE("converge writes one report per metric") {
  auto d = fresh_dir("geomflow_cli_conv");
  REQUIRE(tool({"converge", "--shape", "circle", "--n", "200", "--levels", "3", "--metric", "manifold,hausdorff",
                "--out", d.string(), "--serial"}) == 0);
  for (auto m : {"manifold", "hausdorff"}) {
    CHECK(fs::exists(d / fmt::format("report_{}.csv", m)));
    auto j = read_json(d / fmt::format("report_{}.json", m));
    CHECK(j["errors"].size() == 3);
  }
  auto man = read_json(d / "manifest.json");
  CHECK(man["command"] == "converge");
}

TEST_CASE("cpu-compare") {
  auto d = fresh_dir("geomflow_cli_cpu");
  REQUIRE(tool({"cpu-compare", "--n-values", "40,80", "--exact-ref-factor", "4", "--out", d.string()}) == 0);
  std::ifstream in(d / "cpu.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}
