#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

namespace geomflow {

/// Rank-one term added to a system matrix: matrix + scale * u v^T.
struct RankOneTerm {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double scale = 1.0;
};

struct BlockSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::optional<RankOneTerm> rank1;
};

struct SolveStats {
  /// ||A x - b||_inf / (||A||_inf ||x||_inf + ||b||_inf)
  double relative_residual = 0.0;
  /// Lower estimate of the 1-norm condition number of the sparse part.
  double condition_estimate = 0.0;
};

inline constexpr double kResidualTolerance = 1e-12;
inline constexpr double kConditionLimit = 1e14;

/// Sparse LU solver that keeps the symbolic analysis between calls with the
/// same sparsity pattern. One instance must not be shared between threads.
class DirectSolver {
 public:
  DirectSolver();
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  /// Rank-one terms are handled with the Sherman-Morrison correction on top of
  /// the factorization of the sparse part. Throws SingularSystem.
  Eigen::VectorXd solve(const BlockSystem& system, SolveStats* stats = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Stateless convenience entry point.
Eigen::VectorXd solve(const BlockSystem& system, SolveStats* stats = nullptr);

/// Relative residual of x for the full system (including any rank-one term).
double relative_residual(const BlockSystem& system, const Eigen::VectorXd& x);

}  // namespace geomflow
