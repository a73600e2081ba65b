#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geomflow/errors.hpp"
#include "geomflow/fem_core.hpp"
#include "geomflow/shapes.hpp"
#include "support.hpp"

using namespace geomflow;

TEST_CASE("lumped inner product against a direct trapezoid sum") {
  auto c = equidistributed_sample(shape::Flower{}, 50);
  std::vector<double> u(50), v(50), e(50);
  for (int j = 0; j < 50; ++j) {
    u[j] = std::sin(j);
    v[j] = j * 0.1;
    e[j] = 1.0 + j % 3;
  }
  auto ed = edge_data(c);
  double nodal = 0, mixed = 0;
  for (int j = 0; j < 50; ++j) {
    int k = (j + 49) % 50;  // edge j joins node k and node j
    nodal += 0.5 * ed.edge_lengths[j] * (u[j] * v[j] + u[k] * v[k]);
    mixed += 0.5 * ed.edge_lengths[j] * e[j] * (u[j] + u[k]);
  }
  CHECK(lumped_inner(PiecewiseField::nodal(u), PiecewiseField::nodal(v), c) == doctest::Approx(nodal));
  CHECK(lumped_inner(PiecewiseField::edge_constant(e), PiecewiseField::nodal(u), c) ==
        doctest::Approx(mixed));
  CHECK(lumped_inner(PiecewiseField::constant(1, 50), PiecewiseField::constant(1, 50), c) ==
        doctest::Approx(perimeter(c)));
  CHECK_THROWS_AS(lumped_inner(PiecewiseField::nodal(u), PiecewiseField::constant(1, 49), c),
                  SizeMismatch);
}

TEST_CASE("assembled operators") {
  auto c = equidistributed_sample(shape::Ellipse{}, 40);
  auto op = assemble(c);
  CHECK(op.mass.sum() == doctest::Approx(perimeter(c)));
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(40);
  CHECK(op.apply_stiffness(ones).cwiseAbs().maxCoeff() < 1e-12);
  Vec2 s{};
  for (auto& w : op.normal) s += w;
  CHECK(norm(s) < 1e-13);  // sum of |h| n over a closed polygon

  Eigen::SparseMatrix<double> a = op.stiffness_matrix();
  CHECK((Eigen::MatrixXd(a) - Eigen::MatrixXd(a).transpose()).norm() < 1e-14);
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(40, -1, 2);
  CHECK((a * u - op.apply_stiffness(u)).norm() < 1e-12);

  auto nm = op.normal_matrix();
  CHECK(nm.rows() == 80);
  Eigen::VectorXd nk = nm * u;
  auto pts = op.apply_normal(u);
  for (int j = 0; j < 40; ++j) {
    CHECK(nk[j] == doctest::Approx(pts[j].x));
    CHECK(nk[40 + j] == doctest::Approx(pts[j].y));
  }
  // transpose identity: (N k) . X = k . (N^T X)
  double lhs = 0;
  for (int j = 0; j < 40; ++j) lhs += dot(pts[j], c[j]);
  CHECK(lhs == doctest::Approx(u.dot(op.apply_normal_transpose(c.nodes()))));
}

TEST_CASE("curvature of a regular polygon") {
  // For circumradius R: kappa_j = 1 / (R cos(pi/N)).
  for (std::size_t n : {8, 50, 400}) {
    double r = 1.7;
    auto c = testing::regular_polygon(n, r, 0.2);
    auto k = discrete_curvature(c);
    double exact = 1.0 / (r * std::cos(std::numbers::pi / n));
    for (std::size_t j = 0; j < n; ++j) CHECK(k[j] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("curvature of a fine ellipse approaches the smooth curvature") {
  auto c = equidistributed_sample(shape::Ellipse{}, 10000);
  auto k = discrete_curvature(c);
  double worst = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    double x = c[j].x, y = c[j].y;
    double smooth = 2.0 / std::pow(4 * y * y + x * x / 4, 1.5);
    worst = std::max(worst, std::abs(k[j] - smooth));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("curvature sign flips on nonconvex parts") {
  auto c = equidistributed_sample(shape::Flower{}, 300);
  auto k = discrete_curvature(c);
  CHECK(k.values.minCoeff() < 0);
  CHECK(k.values.maxCoeff() > 0);
}
