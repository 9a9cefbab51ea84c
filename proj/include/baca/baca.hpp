#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "baca/aca.hpp"
#include "baca/clustering.hpp"
#include "baca/hmatrix.hpp"

namespace baca {

struct BacaParams {
  double theta = 0.9;
  double eps_baca = 1e-4;
  double alpha = 100.0;
  int lookahead = 2;
  int initial_rank = 4;  // ACA steps per admissible block for A_0
  int max_outer = 200;
  int cg_max_iter = 20000;
  int max_tightenings = 20;
  double beta = 0.8;
  double eps_floor = 1e-14;  // ACA stopping tolerance used inside the loop
  int threads = 1;
  bool keep_history = false;

  void validate() const;
};

/// One outer iteration k, recorded before the refinement step.
struct BacaIteration {
  int k = 0;
  double eta = 0.0;
  double delta = 0.0;    // ||b - A_k x_k||_2
  double w_norm = 0.0;   // ||W_k x_k||_2
  double abs_tol = 0.0;  // final CG tolerance
  int tightenings = 0;
  int marked = 0;
  int active_blocks = 0;
  int cg_iterations = 0;
  std::size_t entries = 0;
  std::size_t storage_bytes = 0;
  double seconds = 0.0;  // cumulative since the start of baca_solve
};

/// State of one outer iteration, kept for post-hoc estimator checks.
struct BacaSnapshot {
  Eigen::VectorXd x;
  std::vector<BlockSplit> splits;
  std::vector<int> marked;
};

struct BacaResult {
  Eigen::VectorXd x;
  HMatrix h;
  BacaParams params;
  std::vector<BacaIteration> trace;
  std::vector<BacaSnapshot> history;  // filled when params.keep_history
  bool converged = false;
  bool curvature = false;
  double final_residual = 0.0;  // ||b - A_k x_k||_2 of the last iterate
  int cg_iterations = 0;
  double assembly_seconds = 0.0;
  double seconds = 0.0;
};

/// Minimal-cardinality Dörfler set for per-block estimator values (not squared):
/// the shortest prefix of the blocks sorted by decreasing value (ties to the
/// smaller id) carrying at least theta^2 of the squared total.
std::vector<int> mark_doerfler(const std::vector<double>& contributions, double theta);

BacaResult baca_solve(const EntryOracle& oracle, const Eigen::VectorXd& b,
                      const BlockPartition& partition, const BacaParams& params);

struct IterationDiagnostics {
  int k = 0;
  double reliability_ratio = 0.0;  // ||W_k x_k|| / (sqrt(c_sp L) eta_k), 0 when eta_k = 0
  std::optional<double> true_residual;  // ||b - A x_k|| with dense A
  std::optional<double> lower_bound;    // ||b - A x_k|| / ||W_k x_k||
  std::optional<double> c_sat;          // ||\hat A_k x_k - A x_k|| / ||A_k x_k - A x_k||
  // Estimator reduction eta_{k+1}^2 <= q eta_k^2 + z_k (absent for the last k)
  std::optional<double> z;
  std::optional<double> reduction_lhs;
  std::optional<double> reduction_rhs;
};

struct DiagnosticsReport {
  double q = 0.0;
  double sqrt_csp_l = 0.0;
  std::vector<IterationDiagnostics> iterations;
  bool reliability_holds = true;  // reliability_ratio <= 1 + 1e-12 everywhere
  bool reduction_holds = true;
};

/// Requires a result computed with keep_history. `dense` is the exact matrix
/// for small N.
DiagnosticsReport diagnostics(const BacaResult& result, const Eigen::VectorXd& b,
                              const Eigen::MatrixXd* dense = nullptr);

}  // namespace baca
