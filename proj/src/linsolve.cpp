#include "geomflow/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseLU>

#include "geomflow/errors.hpp"

namespace geomflow {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

double inf_norm(const SpMat& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

double one_norm(const SpMat& a) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    double col = 0.0;
    for (SpMat::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

Eigen::VectorXd apply(const BlockSystem& s, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = s.matrix * x;
  if (s.rank1) y += s.rank1->scale * s.rank1->v.dot(x) * s.rank1->u;
  return y;
}

double matrix_inf_norm(const BlockSystem& s) {
  double n = inf_norm(s.matrix);
  if (s.rank1) {
    n += std::abs(s.rank1->scale) * s.rank1->u.lpNorm<Eigen::Infinity>() *
         s.rank1->v.lpNorm<1>();
  }
  return n;
}

void check_dimensions(const BlockSystem& s) {
  const Eigen::Index n = s.matrix.rows();
  bool ok = s.matrix.cols() == n && s.rhs.size() == n;
  if (s.rank1) ok = ok && s.rank1->u.size() == n && s.rank1->v.size() == n;
  if (!ok) throw SizeMismatch("block system dimensions are inconsistent");
}

}  // namespace

struct DirectSolver::Impl {
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  std::vector<SpMat::StorageIndex> outer;
  std::vector<SpMat::StorageIndex> inner;
  bool analyzed = false;

  bool same_pattern(const SpMat& a) const {
    if (!analyzed || a.outerSize() + 1 != static_cast<Eigen::Index>(outer.size()) ||
        a.nonZeros() != static_cast<Eigen::Index>(inner.size())) {
      return false;
    }
    return std::equal(outer.begin(), outer.end(), a.outerIndexPtr()) &&
           std::equal(inner.begin(), inner.end(), a.innerIndexPtr());
  }

  void factorize(const SpMat& a) {
    if (!same_pattern(a)) {
      lu.analyzePattern(a);
      outer.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
      inner.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
      analyzed = true;
    }
    lu.factorize(a);
    if (lu.info() != Eigen::Success) {
      throw SingularSystem("sparse LU factorization failed: " + lu.lastErrorMessage(),
                           std::numeric_limits<double>::infinity());
    }
  }
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

Eigen::VectorXd DirectSolver::solve(const BlockSystem& system, SolveStats* stats) {
  check_dimensions(system);
  SpMat a = system.matrix;
  a.makeCompressed();
  impl_->factorize(a);
  auto& lu = impl_->lu;

  auto solve_full = [&](const Eigen::VectorXd& b, const Eigen::VectorXd* ku) -> Eigen::VectorXd {
    Eigen::VectorXd x = lu.solve(b);
    if (ku) {
      const RankOneTerm& r = *system.rank1;
      // (K + s u v^T)^{-1} b = K^{-1} b - s K^{-1} u (v^T K^{-1} b) / (1 + s v^T K^{-1} u)
      const double denom = 1.0 + r.scale * r.v.dot(*ku);
      x -= (r.scale * r.v.dot(x) / denom) * (*ku);
    }
    return x;
  };

  Eigen::VectorXd ku;
  if (system.rank1) {
    ku = lu.solve(system.rank1->u);
    const double denom = 1.0 + system.rank1->scale * system.rank1->v.dot(ku);
    const double size = 1.0 + std::abs(system.rank1->scale) * std::abs(system.rank1->v.dot(ku));
    if (!(std::abs(denom) > 1e-14 * size)) {
      throw SingularSystem("rank-one update makes the system singular",
                           std::numeric_limits<double>::infinity());
    }
  }
  const Eigen::VectorXd* kup = system.rank1 ? &ku : nullptr;

  Eigen::VectorXd x = solve_full(system.rhs, kup);
  const double anorm = matrix_inf_norm(system);
  const double bnorm = system.rhs.lpNorm<Eigen::Infinity>();
  auto residual_of = [&](const Eigen::VectorXd& r, const Eigen::VectorXd& sol) {
    const double denom = anorm * sol.lpNorm<Eigen::Infinity>() + bnorm;
    return denom > 0.0 ? r.lpNorm<Eigen::Infinity>() / denom : r.lpNorm<Eigen::Infinity>();
  };
  Eigen::VectorXd r = system.rhs - apply(system, x);
  double rel = residual_of(r, x);
  for (int refine = 0; refine < 2 && rel > 0.25 * kResidualTolerance; ++refine) {
    x += solve_full(r, kup);
    r = system.rhs - apply(system, x);
    rel = residual_of(r, x);
  }

  // Norm-based lower estimate of ||K^{-1}||_1 from the solution and one probe.
  Eigen::VectorXd probe(a.rows());
  for (Eigen::Index i = 0; i < probe.size(); ++i) probe[i] = (i % 3 == 0) ? 1.0 : ((i % 3 == 1) ? -1.0 : 0.5);
  const Eigen::VectorXd kp = lu.solve(probe);
  double inv_norm = kp.lpNorm<1>() / probe.lpNorm<1>();
  if (bnorm > 0.0) inv_norm = std::max(inv_norm, x.lpNorm<1>() / system.rhs.lpNorm<1>());
  const double condition = one_norm(a) * inv_norm;

  if (stats) {
    stats->relative_residual = rel;
    stats->condition_estimate = condition;
  }
  if (!std::isfinite(rel) || !x.allFinite() || !(condition <= kConditionLimit)) {
    throw SingularSystem("linear system is numerically singular (condition estimate " +
                             std::to_string(condition) + ")",
                         condition);
  }
  if (rel > kResidualTolerance) {
    throw SingularSystem("relative residual " + std::to_string(rel) + " exceeds tolerance",
                         condition);
  }
  return x;
}

Eigen::VectorXd solve(const BlockSystem& system, SolveStats* stats) {
  DirectSolver solver;
  return solver.solve(system, stats);
}

double relative_residual(const BlockSystem& system, const Eigen::VectorXd& x) {
  const Eigen::VectorXd r = system.rhs - apply(system, x);
  const double denom =
      matrix_inf_norm(system) * x.lpNorm<Eigen::Infinity>() + system.rhs.lpNorm<Eigen::Infinity>();
  return denom > 0.0 ? r.lpNorm<Eigen::Infinity>() / denom : r.lpNorm<Eigen::Infinity>();
}

}  // namespace geomflow
