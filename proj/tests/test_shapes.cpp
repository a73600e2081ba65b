#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geomflow/errors.hpp"
#include "geomflow/shapes.hpp"

using namespace geomflow;
const double pi = std::numbers::pi;

TEST_CASE("circle sample lies on the circle, clockwise from angle 0") {
  auto c = equidistributed_sample(shape::Circle{1.5}, 64);
  CHECK(c[0].x == doctest::Approx(1.5));
  CHECK(c[0].y == doctest::Approx(0.0).scale(1.0));
  CHECK(c[1].y < 0.0);
  for (auto& p : c.nodes()) CHECK(norm(p) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(mesh_ratio(c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ellipse perimeter matches the complete elliptic integral") {
  // P = 4 a E(e), e^2 = 1 - b^2/a^2
  double e = std::sqrt(1.0 - 0.25);
  double exact = 4.0 * 2.0 * std::comp_ellint_2(e);
  CHECK(shape_perimeter(shape::Ellipse{}) == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("ellipse nodes on the ellipse with equal chords") {
  auto c = equidistributed_sample(shape::Ellipse{}, 200);
  for (auto& p : c.nodes()) CHECK(p.x * p.x / 4 + p.y * p.y == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mesh_ratio(c) < 1.0 + 1e-9);
  CHECK(signed_area(c.nodes()) < 0);
  CHECK(enclosed_area(c) == doctest::Approx(2 * pi).epsilon(1e-3));
}

TEST_CASE("flower nodes satisfy r = 2 + cos 6 theta") {
  auto c = equidistributed_sample(shape::Flower{}, 300);
  for (auto& p : c.nodes()) {
    double th = std::atan2(p.y, p.x);
    CHECK(norm(p) == doctest::Approx(2 + std::cos(6 * th)).epsilon(1e-11));
  }
  CHECK(mesh_ratio(c) < 1.0 + 1e-9);
}

TEST_CASE("nonconvex benchmark nodes lie on the parametrized curve") {
  ShapeSpec s = shape::NonconvexBenchmark{};
  auto c = equidistributed_sample(s, 128);
  // x = cos(2 pi rho) determines sin(2 pi rho) up to sign; check y for either branch
  for (auto& p : c.nodes()) {
    double cx = std::clamp(p.x, -1.0, 1.0);
    double s1 = std::sqrt(1 - cx * cx);
    auto y_of = [&](double sn) {
      double rho = std::atan2(sn, cx) / (2 * pi);
      double s6 = std::sin(6 * pi * rho);
      return std::sin(cx) + sn * (0.7 + sn * s6 * s6);
    };
    double d = std::min(std::abs(y_of(s1) - p.y), std::abs(y_of(-s1) - p.y));
    CHECK(d < 1e-9);
  }
  CHECK(shape_point(s, 0.0).x == doctest::Approx(1.0));
}

TEST_CASE("tube perimeter and junction vertices") {
  shape::Tube t{};
  CHECK(shape_perimeter(t) == doctest::Approx(2 * 4.0 + 2 * pi * 0.5).epsilon(1e-12));
  auto c = equidistributed_sample(t, 640);
  int junctions = 0;
  for (auto& p : c.nodes())
    if (std::abs(std::abs(p.x) - 2.0) < 1e-12 && std::abs(std::abs(p.y) - 0.5) < 1e-12) ++junctions;
  CHECK(junctions == 4);
  for (auto& p : c.nodes()) {
    if (std::abs(p.x) <= 2.0) CHECK(std::abs(p.y) == doctest::Approx(0.5));
    else CHECK(norm(p - Vec2{p.x > 0 ? 2.0 : -2.0, 0}) == doctest::Approx(0.5));
  }
  CHECK(mesh_ratio(c) < 1.01);
}

TEST_CASE("shrinking circle") {
  auto c = shrinking_circle(1.0, 0.25, 50);
  for (auto& p : c.nodes()) CHECK(norm(p) == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(shrinking_circle(1.0, 0.5, 50), InvalidArgument);
}

TEST_CASE("catalog and lookup") {
  auto cat = shape_catalog();
  CHECK(cat.size() >= 5);
  for (auto& e : cat) CHECK(shape_name(shape_from_name(e.name)) == e.name);
  CHECK_THROWS_AS(shape_from_name("pentagram"), InvalidArgument);
  CHECK_THROWS_AS(validate(shape::Circle{-1.0}), InvalidArgument);
  CHECK_THROWS_AS(validate(shape::Custom{"x", nullptr}), InvalidArgument);
  CHECK(shape_key(shape::Ellipse{3, 1}) != shape_key(shape::Ellipse{2, 1}));
}

TEST_CASE("custom parametrization") {
  shape::Custom sq{"circle2", [](double rho) {
                     return Vec2{2 * std::cos(2 * pi * rho), 2 * std::sin(2 * pi * rho)};
                   }};
  auto c = equidistributed_sample(sq, 40);
  CHECK(perimeter(c) == doctest::Approx(2 * 40 * 2 * std::sin(pi / 40)).epsilon(1e-10));
}
