#include "baca/solver.hpp"

#include <cmath>

#include "baca/errors.hpp"

namespace baca {

namespace {
constexpr int kRestart = 50;
}

CgOutcome cg_solve(const VectorOperator& op, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                   double abs_tol, int max_iter) {
  if (x0.size() != b.size()) throw DimensionError("cg: start vector and rhs differ in length");
  if (!(abs_tol > 0.0)) throw PreconditionError("cg: tolerance must be positive");
  if (max_iter < 1) throw PreconditionError("cg: max_iter must be positive");

  CgOutcome out;
  out.x = x0;
  Eigen::VectorXd r = b - op(out.x);
  double rr = r.squaredNorm();
  out.residual = std::sqrt(rr);
  if (out.residual <= abs_tol) {
    out.converged = true;
    return out;
  }
  Eigen::VectorXd p = r;
  int since_restart = 0;
  while (out.iterations < max_iter) {
    const Eigen::VectorXd q = op(p);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) {
      out.curvature = true;
      break;
    }
    const double a = rr / pq;
    out.x += a * p;
    r -= a * q;
    ++out.iterations;
    ++since_restart;

    const bool check = std::sqrt(r.squaredNorm()) <= abs_tol;
    if (check || since_restart == kRestart) {
      r = b - op(out.x);
      since_restart = 0;
      const double true_rr = r.squaredNorm();
      if (std::sqrt(true_rr) <= abs_tol) {
        out.residual = std::sqrt(true_rr);
        out.converged = true;
        return out;
      }
      rr = true_rr;
      p = r;
      continue;
    }
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  out.residual = (b - op(out.x)).norm();
  out.converged = out.residual <= abs_tol;
  return out;
}

}  // namespace baca
