#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace baca {

/// Matrix entry (i, j) in global indices; must be pure.
using EntryOracle = std::function<double(int, int)>;

enum class AcaStatus { active, converged, exhausted, densified };

inline bool is_terminal(AcaStatus s) { return s != AcaStatus::active; }
const char* to_string(AcaStatus s);

/// eps (1 - beta) / (1 + eps), the factor of the ACA stopping test.
inline double aca_stopping_factor(double eps, double beta) {
  return eps * (1.0 - beta) / (1.0 + eps);
}

/// Cross approximation S_r = sum_l u_l v_l^T of one block A_ts that can be
/// resumed step by step. Factors are append-only: once computed, u_l and v_l
/// never change, so any prefix S_q (q <= r) stays available.
class AcaBlockState {
 public:
  AcaBlockState() = default;
  AcaBlockState(std::vector<int> rows, std::vector<int> cols);

  int rank() const { return static_cast<int>(u_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_cols() const { return static_cast<int>(cols_.size()); }
  const std::vector<int>& rows() const { return rows_; }
  const std::vector<int>& cols() const { return cols_; }
  const Eigen::VectorXd& u(int l) const { return u_[l]; }
  const Eigen::VectorXd& v(int l) const { return v_[l]; }
  const std::vector<int>& row_pivots() const { return row_pivots_; }  // local indices
  const std::vector<int>& col_pivots() const { return col_pivots_; }
  /// Z: rows whose remainder has been consumed (local indices).
  const std::vector<char>& used_rows() const { return used_; }
  int used_count() const { return used_count_; }
  AcaStatus status() const { return status_; }
  /// ||S_r||_F^2, updated incrementally.
  double norm_sq() const { return norm_sq_; }
  /// Number of oracle evaluations made for this block.
  std::size_t entries() const { return entries_; }
  /// Exact block, filled once the state is densified.
  const Eigen::MatrixXd& dense() const { return dense_; }

  friend int aca_advance(AcaBlockState& state, const EntryOracle& oracle, int steps, double eps,
                         double beta);

 private:
  int next_row() const;
  void densify(const EntryOracle& oracle);

  std::vector<int> rows_, cols_;
  std::vector<Eigen::VectorXd> u_, v_;
  std::vector<int> row_pivots_, col_pivots_;
  std::vector<char> used_;
  int used_count_ = 0;
  bool last_row_vanished_ = false;
  double norm_sq_ = 0.0;
  double scale_ = 0.0;  // largest |entry| seen so far
  std::size_t entries_ = 0;
  AcaStatus status_ = AcaStatus::active;
  Eigen::MatrixXd dense_;
};

/// Performs up to `steps` accepted cross steps. Returns the number accepted.
/// Throws PreconditionError if the state is not active.
int aca_advance(AcaBlockState& state, const EntryOracle& oracle, int steps, double eps,
                double beta);

/// Materialises S_r; guarded to |t| |s| <= 1e6.
Eigen::MatrixXd low_rank_eval(const AcaBlockState& state);

/// sum_{l = from+1}^{to} u_l (v_l^T x) for 0 <= from <= to <= r.
Eigen::VectorXd apply_partial(const AcaBlockState& state, const Eigen::VectorXd& x, int from,
                              int to);

/// ||sum_{l = from+1}^{to} u_l v_l^T||_F from the factor Gramians.
double partial_frobenius_sq(const AcaBlockState& state, int from, int to);

}  // namespace baca
