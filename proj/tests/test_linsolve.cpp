#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "geomflow/errors.hpp"
#include "geomflow/linsolve.hpp"

using namespace geomflow;

static Eigen::SparseMatrix<double> sparse(const Eigen::MatrixXd& d) { return d.sparseView(); }

TEST_CASE("identity") {
  BlockSystem s{sparse(Eigen::MatrixXd::Identity(5, 5)), Eigen::VectorXd::LinSpaced(5, 1, 5), {}};
  SolveStats st;
  auto x = solve(s, &st);
  CHECK((x - s.rhs).norm() == 0.0);
  CHECK(st.relative_residual < 1e-15);
}

TEST_CASE("random system against dense LU") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Eigen::MatrixXd d(30, 30);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) d(i, j) = (std::abs(i - j) < 4 || (i * j) % 7 == 0) ? g(rng) : 0.0;
  d.diagonal().array() += 10.0;
  Eigen::VectorXd b(30);
  for (auto& v : b) v = g(rng);
  Eigen::VectorXd oracle = d.partialPivLu().solve(b);
  BlockSystem s{sparse(d), b, {}};
  auto x = solve(s);
  CHECK((x - oracle).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(relative_residual(s, x) < kResidualTolerance);

  SUBCASE("with a rank-one term") {
    Eigen::VectorXd u(30), v(30);
    for (int i = 0; i < 30; ++i) {
      u[i] = g(rng);
      v[i] = g(rng);
    }
    Eigen::MatrixXd full = d + 0.3 * u * v.transpose();
    Eigen::VectorXd o2 = full.partialPivLu().solve(b);
    BlockSystem r{sparse(d), b, RankOneTerm{u, v, 0.3}};
    DirectSolver solver;
    auto x2 = solver.solve(r);
    CHECK((x2 - o2).lpNorm<Eigen::Infinity>() < 1e-11);
    CHECK(relative_residual(r, x2) < kResidualTolerance);
    auto x3 = solver.solve(r);  // reuse of the analysis gives the same bits
    CHECK((x3 - x2).norm() == 0.0);
  }
}

TEST_CASE("rank-one update on the identity") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
  e1[0] = 1;
  BlockSystem s{sparse(Eigen::MatrixXd::Identity(4, 4)), Eigen::VectorXd::Constant(4, 3.0),
                RankOneTerm{e1, e1, 0.5}};
  auto x = solve(s);
  CHECK(x[0] == doctest::Approx(3.0 / 1.5));
  CHECK(x[3] == doctest::Approx(3.0));
}

TEST_CASE("singular systems are reported") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(3, 3);
  d(2, 2) = 0;
  CHECK_THROWS_AS(solve(BlockSystem{sparse(d), Eigen::VectorXd::Ones(3), {}}), SingularSystem);

  // rank-one term that cancels a pivot
  Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
  e[1] = 1;
  CHECK_THROWS_AS(solve(BlockSystem{sparse(Eigen::MatrixXd::Identity(3, 3)), Eigen::VectorXd::Ones(3),
                                    RankOneTerm{e, e, -1.0}}),
                  SingularSystem);
}
