#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "geomflow/harness.hpp"
#include "support.hpp"

using namespace geomflow;
namespace fs = std::filesystem;

static fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TEST_CASE("orders") {
  auto o = convergence_orders({1.0, 0.25, 0.0625, 0.03125});
  REQUIRE(o.size() == 3);
  CHECK(o[0] == doctest::Approx(2.0));
  CHECK(o[1] == doctest::Approx(2.0));
  CHECK(o[2] == doctest::Approx(1.0));
  CHECK(convergence_orders({1.0}).empty());
}

TEST_CASE("exact reference for CSF from a circle") {
  CHECK(has_exact_reference(shape::Circle{}, FlowKind::CSF));
  CHECK(!has_exact_reference(shape::Circle{}, FlowKind::SDF));
  CHECK(!has_exact_reference(shape::Ellipse{}, FlowKind::CSF));
  ReferenceSpec r{shape::Circle{}, FlowKind::CSF, 500, 1e-3, 0.25};
  CHECK(reference_solution(r, std::nullopt) == shrinking_circle(1.0, 0.25, 500));
}

TEST_CASE("computed reference is cached bit-exactly") {
  auto dir = fresh_dir("geomflow_cache_test");
  ReferenceSpec r{shape::Ellipse{}, FlowKind::SDF, 64, 1.0 / 64, 0.25};
  auto key = reference_cache_key(r);
  CHECK(key.size() > 5);
  CHECK(key.substr(key.size() - 5) == ".json");
  CHECK(key != reference_cache_key(ReferenceSpec{shape::Ellipse{}, FlowKind::SDF, 64, 1.0 / 128, 0.25}));
  CHECK(key != reference_cache_key(ReferenceSpec{shape::Ellipse{}, FlowKind::CSF, 64, 1.0 / 64, 0.25}));
  auto first = reference_solution(r, dir);
  CHECK(fs::exists(dir / key));
  auto second = reference_solution(r, dir);
  CHECK(first == second);
  auto direct = reference_solution(r, std::nullopt);
  CHECK(first == direct);
  SchemeConfig c{FlowKind::SDF, SchemeKind::BGN2, 1.0 / 64, 0.25, 10.0, InitMode::KappaFormula, 64};
  CHECK(run(shape::Ellipse{}, c).curr.curve == first);
  fs::remove_all(dir);
}

TEST_CASE("small convergence study") {
  StudyConfig s;
  s.shape = shape::Circle{};
  s.n = 400;
  s.levels = 3;
  s.metrics = {MetricKind::Manifold, MetricKind::Hausdorff, MetricKind::L2};
  s.parallel = false;
  auto reports = convergence_study(s);
  REQUIRE(reports.size() == 3);
  for (auto& r : reports) {
    CHECK(!r.partial);
    REQUIRE(r.errors.size() == 3);
    CHECK(r.taus[0] == doctest::Approx(1.0 / 40));
    CHECK(r.taus[2] == doctest::Approx(1.0 / 160));
    auto o = convergence_orders(r.errors);
    for (std::size_t k = 0; k < o.size(); ++k) CHECK(r.orders[k] == o[k]);
    for (double t : r.runtimes) CHECK(t >= 0.0);
  }
  // same runs behind every metric: the exact circle reference makes the
  // manifold error of a circle-like polygon about 2 pi r times the radius gap
  CHECK(reports[0].errors[0] > reports[0].errors[2]);
  CHECK(reports[0].orders[0] == doctest::Approx(2.0).epsilon(0.1));
  auto single = convergence_study(s, MetricKind::Hausdorff);
  CHECK(single.errors == reports[1].errors);
}

TEST_CASE("reference refinement barely moves the coarsest error") {
  StudyConfig s;
  s.n = 400;
  s.levels = 2;
  s.parallel = false;
  s.tau0 = 1.0 / 20;
  auto a = convergence_study(s, MetricKind::Manifold);
  s.tau_ref = 1.0 / 640;  // twice finer than the default tau_min / 8
  auto b = convergence_study(s, MetricKind::Manifold);
  CHECK(std::abs(a.errors[0] - b.errors[0]) < 0.05 * a.errors[0]);
}

TEST_CASE("paper-scale defaults") {
  auto d = default_study(false);
  CHECK(d.n == 2000);
  CHECK(d.tau0 == 1.0 / 40);
  CHECK(d.levels == 4);
  auto p = default_study(true);
  CHECK(p.n == 10000);
  CHECK(p.n_ref == 10000);
  CHECK(p.tau_ref == 1.0 / 20480);
}

TEST_CASE("diagnostics recorder") {
  DiagnosticsRecorder rec;
  Observer obs = rec.observer();
  SchemeConfig c{FlowKind::SDF, SchemeKind::BGN2, 1.0 / 128, 0.25, 10.0, InitMode::KappaFormula, 64};
  run(shape::Ellipse{}, c, std::span(&obs, 1));
  auto& s = rec.series();
  REQUIRE(s.size() == 33);
  CHECK(s.rel_area_loss[0] == 0.0);
  CHECK(s.norm_perimeter[0] == 1.0);
  CHECK(s.mr_count.back() == 0);
  for (std::size_t m = 0; m < s.size(); ++m) {
    CHECK(std::abs(s.rel_area_loss[m]) < 1e-3);
    CHECK(s.norm_perimeter[m] <= 1.0 + 1e-9);
  }
  auto csv = format_diagnostics_csv(s);
  CHECK(csv.rfind("t,dA,L_ratio,Psi,mr_count\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 34);
}

TEST_CASE("report formats") {
  ConvergenceReport r;
  r.metric = MetricKind::Hausdorff;
  r.taus = {0.1, 0.05};
  r.errors = {1.0 / 3.0, 1.0 / 12.0};
  r.orders = convergence_orders(r.errors);
  r.runtimes = {0.5, 1.0};
  auto csv = format_report_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "tau,error,order,seconds");
  std::getline(in, line);
  CHECK(line.find("0.33333333333333331") != std::string::npos);
  std::getline(in, line);
  CHECK(line.find(",,") != std::string::npos);  // no order on the last row

  auto j = nlohmann::json::parse(format_report_json(r));
  CHECK(j["metric"] == "hausdorff");
  CHECK(j["errors"][1].get<double>() == 1.0 / 12.0);
  CHECK(j["orders"].size() == 1);
  CHECK(j["partial"] == false);

  CpuRow row{SchemeKind::BGN2, 160, 1.0 / 320, 16, 0.05, 1e-4, 2e-5, 0.01};
  auto cpu = format_cpu_csv({row});
  CHECK(cpu.rfind("scheme,N,tau,T,E_M,E_H,seconds\nbgn2,160,", 0) == 0);
}

TEST_CASE("cpu comparison rows") {
  CpuConfig c;
  c.n_values = {40, 80};
  c.t_end = 0.05;
  c.exact_ref_factor = 8;
  auto rows = cpu_comparison(c);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].scheme == SchemeKind::BGN1);
  CHECK(rows[3].scheme == SchemeKind::BGN2);
  CHECK(rows[1].n == 80);
  CHECK(rows[1].tau == doctest::Approx(0.5 / 80));
  CHECK(rows[1].steps == 8);
  CHECK(rows[0].steps == 4);
  CHECK(rows[0].t_realized == doctest::Approx(0.05));
  for (auto& r : rows) {
    CHECK(r.manifold > 0);
    CHECK(r.hausdorff > 0);
  }
  c.t_end = 0.06;  // not a multiple of 0.5/40 = 0.0125: rounded down
  auto r2 = cpu_comparison(c);
  CHECK(r2[0].steps == 4);
  CHECK(r2[0].t_realized == doctest::Approx(0.05));
}
