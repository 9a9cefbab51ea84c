#include "baca/baca.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "baca/errors.hpp"
#include "baca/solver.hpp"

namespace baca {

void BacaParams::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw PreconditionError("theta must lie in (0, 1)");
  if (!(eps_baca > 0.0)) throw PreconditionError("eps_baca must be positive");
  if (!(alpha >= 0.0)) throw PreconditionError("alpha must be non-negative");
  if (lookahead < 1) throw PreconditionError("lookahead must be positive");
  if (initial_rank < 0) throw PreconditionError("initial rank must be non-negative");
  if (max_outer < 1) throw PreconditionError("max_outer must be positive");
  if (cg_max_iter < 1) throw PreconditionError("cg_max_iter must be positive");
  if (max_tightenings < 0) throw PreconditionError("max_tightenings must be non-negative");
  if (!(beta > 0.0 && beta < 1.0)) throw PreconditionError("beta must lie in (0, 1)");
  if (!(eps_floor > 0.0)) throw PreconditionError("eps_floor must be positive");
}

std::vector<int> mark_doerfler(const std::vector<double>& contributions, double theta) {
  std::vector<double> sq(contributions.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    if (!(contributions[i] >= 0.0)) throw PreconditionError("contributions must be non-negative");
    sq[i] = contributions[i] * contributions[i];
    total += sq[i];
  }
  if (total <= 0.0) return {};
  std::vector<int> order(sq.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sq[a] > sq[b]; });
  const double target = theta * theta * total;
  double acc = 0.0;
  std::vector<int> marked;
  for (int id : order) {
    if (sq[id] <= 0.0) break;
    marked.push_back(id);
    acc += sq[id];
    if (acc >= target) break;
  }
  return marked;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

BacaResult baca_solve(const EntryOracle& oracle, const Eigen::VectorXd& b,
                      const BlockPartition& partition, const BacaParams& params) {
  params.validate();
  if (b.size() != partition.tree.size()) throw DimensionError("rhs length differs from N");
  const auto t0 = std::chrono::steady_clock::now();

  HMatrix h(partition, oracle, params.lookahead, params.threads);
  h.initialize(params.initial_rank, params.eps_floor, params.beta);
  BacaResult res{Eigen::VectorXd::Zero(b.size()), std::move(h), params, {}, {}, false, false,
                 0.0, 0, 0.0, 0.0};
  res.assembly_seconds = seconds_since(t0);
  HMatrix& H = res.h;
  const VectorOperator op = [&H](const Eigen::VectorXd& v) { return matvec(H, v, MatvecMode::Ak); };

  double eta_prev = 0.0;
  for (int k = 0; k < params.max_outer; ++k) {
    BacaIteration it;
    it.k = k;
    double tol = k == 0 ? params.eps_baca
                        : std::max(params.alpha * eta_prev, params.eps_baca) / 4.0;
    CgOutcome cg = cg_solve(op, b, res.x, tol, params.cg_max_iter);
    it.cg_iterations += cg.iterations;
    res.curvature = res.curvature || cg.curvature;
    double w = matvec(H, cg.x, MatvecMode::Wk).norm();
    while (w > 0.0 && cg.residual > params.alpha * w && it.tightenings < params.max_tightenings &&
           !cg.curvature) {
      tol = std::min(tol, cg.residual) / 2.0;
      cg = cg_solve(op, b, cg.x, tol, params.cg_max_iter);
      it.cg_iterations += cg.iterations;
      res.curvature = res.curvature || cg.curvature;
      w = matvec(H, cg.x, MatvecMode::Wk).norm();
      ++it.tightenings;
    }
    res.x = std::move(cg.x);
    it.delta = cg.residual;
    it.w_norm = w;
    it.abs_tol = tol;

    const auto est = estimator_contributions(H, res.x);
    it.eta = est.eta;
    for (int s = 0; s < H.num_admissible(); ++s) it.active_blocks += H.is_terminal(s) ? 0 : 1;
    const bool done = !(est.eta > params.eps_baca);
    std::vector<int> marked;
    if (!done) marked = mark_doerfler(est.per_block, params.theta);
    it.marked = static_cast<int>(marked.size());

    const auto storage = storage_stats(H);
    it.entries = storage.entries;
    it.storage_bytes = storage.bytes;
    res.cg_iterations += it.cg_iterations;
    res.final_residual = it.delta;
    if (params.keep_history) res.history.push_back({res.x, H.splits(), marked});
    eta_prev = est.eta;

    if (done) {
      res.converged = true;
      it.seconds = seconds_since(t0);
      res.trace.push_back(it);
      break;
    }
    if (k + 1 < params.max_outer) H.refine(marked, params.eps_floor, params.beta);
    it.seconds = seconds_since(t0);
    res.trace.push_back(it);
  }
  res.seconds = seconds_since(t0);
  return res;
}

namespace {

Eigen::VectorXd gather(const ClusterTree& tree, int node, const Eigen::VectorXd& x) {
  const auto idx = tree.indices(node);
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[idx[i]];
  return out;
}

}  // namespace

DiagnosticsReport diagnostics(const BacaResult& result, const Eigen::VectorXd& b,
                              const Eigen::MatrixXd* dense) {
  const HMatrix& H = result.h;
  const auto& p = H.partition();
  const auto& tree = p.tree;
  if (result.history.size() != result.trace.size()) {
    throw PreconditionError("diagnostics need a run with keep_history");
  }
  const double theta = result.params.theta;
  DiagnosticsReport rep;
  rep.q = 1.0 - 0.5 * theta * theta;
  rep.sqrt_csp_l = std::sqrt(static_cast<double>(p.sparsity) * p.depth);
  const double young = 0.5 * theta * theta / (1.0 - theta * theta);

  const std::size_t n = result.trace.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& it = result.trace[k];
    const auto& snap = result.history[k];
    IterationDiagnostics d;
    d.k = it.k;
    const double bound = rep.sqrt_csp_l * it.eta;
    d.reliability_ratio = bound > 0.0 ? it.w_norm / bound : (it.w_norm > 0.0 ? INFINITY : 0.0);
    if (d.reliability_ratio > 1.0 + 1e-12) rep.reliability_holds = false;

    if (dense) {
      const Eigen::VectorXd ax = *dense * snap.x;
      const double res_true = (b - ax).norm();
      d.true_residual = res_true;
      if (it.w_norm > 0.0) d.lower_bound = res_true / it.w_norm;
      const double e_ak = (matvec_split(H, snap.splits, snap.x, MatvecMode::Ak) - ax).norm();
      const double e_ahat = (matvec_split(H, snap.splits, snap.x, MatvecMode::Ahat) - ax).norm();
      if (e_ak > 0.0) d.c_sat = e_ahat / e_ak;
    }

    if (k + 1 < n) {
      const auto& next = result.history[k + 1];
      std::vector<char> in_m(H.num_admissible(), 0);
      for (int s : snap.marked) in_m[s] = 1;
      const Eigen::VectorXd dx = next.x - snap.x;
      double marked_sum = 0.0, rest_sum = 0.0;
      for (int s = 0; s < H.num_admissible(); ++s) {
        const int col = H.admissible_block(s).col;
        if (in_m[s]) {
          const auto xs = gather(tree, col, next.x);
          const Eigen::VectorXd diff = H.apply_block(s, snap.splits[s], true, xs) -
                                       H.apply_block(s, next.splits[s], true, xs);
          marked_sum += diff.squaredNorm();
        } else {
          const auto& sp = snap.splits[s];
          if (sp.dense || sp.base == sp.ahead) continue;
          const auto ds = gather(tree, col, dx);
          rest_sum += apply_partial(H.aca_state(s), ds, sp.base, sp.ahead).squaredNorm();
        }
      }
      const double z = marked_sum + (1.0 + 1.0 / young) * rest_sum;
      const double eta_next = result.trace[k + 1].eta;
      d.z = z;
      d.reduction_lhs = eta_next * eta_next;
      d.reduction_rhs = rep.q * it.eta * it.eta + z;
      const double slack = 1e-12 * std::max(1.0, *d.reduction_rhs);
      if (*d.reduction_lhs > *d.reduction_rhs + slack) rep.reduction_holds = false;
    }
    rep.iterations.push_back(d);
  }
  return rep;
}

}  // namespace baca
