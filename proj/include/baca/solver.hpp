#pragma once

#include <functional>

#include <Eigen/Dense>

namespace baca {

using VectorOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct CgOutcome {
  Eigen::VectorXd x;
  double residual = 0.0;  // ||b - op(x)||_2, recomputed on exit
  int iterations = 0;
  bool curvature = false;  // some p^T op(p) <= 0 was seen
  bool converged = false;
};

/// Unpreconditioned CG with an absolute residual tolerance. The recurrence
/// residual is replaced by the true one every 50 iterations and before
/// accepting convergence. Calling again from `x` with a smaller tolerance
/// resumes the iteration.
CgOutcome cg_solve(const VectorOperator& op, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                   double abs_tol, int max_iter);

}  // namespace baca
