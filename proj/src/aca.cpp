#include "baca/aca.hpp"

#include <cmath>

#include "baca/errors.hpp"

namespace baca {

namespace {

constexpr double kVanishing = 1e-14;

}  // namespace

const char* to_string(AcaStatus s) {
  switch (s) {
    case AcaStatus::active: return "active";
    case AcaStatus::converged: return "converged";
    case AcaStatus::exhausted: return "exhausted";
    case AcaStatus::densified: return "densified";
  }
  return "?";
}

AcaBlockState::AcaBlockState(std::vector<int> rows, std::vector<int> cols)
    : rows_(std::move(rows)), cols_(std::move(cols)), used_(rows_.size(), 0) {
  if (rows_.empty() || cols_.empty()) throw PreconditionError("empty ACA block");
}

int AcaBlockState::next_row() const {
  int best = -1;
  if (!u_.empty() && !last_row_vanished_) {
    const auto& u = u_.back();
    double best_val = -1.0;
    for (int i = 0; i < num_rows(); ++i) {
      if (!used_[i] && std::abs(u[i]) > best_val) {
        best_val = std::abs(u[i]);
        best = i;
      }
    }
    return best;
  }
  for (int i = 0; i < num_rows(); ++i) {
    if (!used_[i]) return i;
  }
  return best;
}

void AcaBlockState::densify(const EntryOracle& oracle) {
  dense_.resize(num_rows(), num_cols());
  for (int j = 0; j < num_cols(); ++j) {
    for (int i = 0; i < num_rows(); ++i) dense_(i, j) = oracle(rows_[i], cols_[j]);
  }
  entries_ += static_cast<std::size_t>(num_rows()) * num_cols();
  status_ = AcaStatus::densified;
}

int aca_advance(AcaBlockState& st, const EntryOracle& oracle, int steps, double eps,
                double beta) {
  if (st.status_ != AcaStatus::active) throw PreconditionError("ACA state is not active");
  const double factor = aca_stopping_factor(eps, beta);
  const int m = st.num_rows(), n = st.num_cols();
  int accepted = 0;
  Eigen::VectorXd row(n), col(m);
  while (accepted < steps && st.status_ == AcaStatus::active) {
    const int i = st.next_row();
    for (int j = 0; j < n; ++j) row[j] = oracle(st.rows_[i], st.cols_[j]);
    st.entries_ += n;
    st.scale_ = std::max(st.scale_, row.cwiseAbs().maxCoeff());
    for (int l = 0; l < st.rank(); ++l) row -= st.u_[l][i] * st.v_[l];
    st.used_[i] = 1;
    ++st.used_count_;

    Eigen::Index jp = 0;
    const double pivot_abs = row.cwiseAbs().maxCoeff(&jp);  // first maximum on ties
    if (pivot_abs <= kVanishing * st.scale_) {
      st.last_row_vanished_ = true;
      // a vanishing row means the next cross term is zero, which passes the test
      if (st.rank() > 0) {
        st.status_ = AcaStatus::converged;
      } else if (st.used_count_ == m) {
        st.status_ = AcaStatus::exhausted;
      }
      continue;
    }
    st.last_row_vanished_ = false;
    const int j = static_cast<int>(jp);
    Eigen::VectorXd v = row / row[j];
    for (int k = 0; k < m; ++k) col[k] = oracle(st.rows_[k], st.cols_[j]);
    st.entries_ += m;
    st.scale_ = std::max(st.scale_, col.cwiseAbs().maxCoeff());
    for (int l = 0; l < st.rank(); ++l) col -= st.v_[l][j] * st.u_[l];

    const double uu = col.squaredNorm(), vv = v.squaredNorm();
    double cross = 0.0;
    for (int l = 0; l < st.rank(); ++l) cross += st.u_[l].dot(col) * st.v_[l].dot(v);
    st.norm_sq_ += 2.0 * cross + uu * vv;
    st.u_.push_back(col);
    st.v_.push_back(std::move(v));
    st.row_pivots_.push_back(i);
    st.col_pivots_.push_back(j);
    ++accepted;

    if (std::sqrt(uu * vv) <= factor * std::sqrt(std::max(st.norm_sq_, 0.0))) {
      st.status_ = AcaStatus::converged;
    } else if (st.used_count_ == m) {
      st.status_ = AcaStatus::exhausted;
    } else if (2 * st.rank() > std::min(m, n)) {
      st.densify(oracle);
    }
  }
  return accepted;
}

Eigen::MatrixXd low_rank_eval(const AcaBlockState& st) {
  if (static_cast<double>(st.num_rows()) * st.num_cols() > 1e6) {
    throw SizeError("low_rank_eval limited to blocks with at most 1e6 entries");
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(st.num_rows(), st.num_cols());
  for (int l = 0; l < st.rank(); ++l) s.noalias() += st.u(l) * st.v(l).transpose();
  return s;
}

Eigen::VectorXd apply_partial(const AcaBlockState& st, const Eigen::VectorXd& x, int from,
                              int to) {
  if (from < 0 || from > to || to > st.rank()) {
    throw RangeError("apply_partial: invalid rank range [" + std::to_string(from) + ", " +
                     std::to_string(to) + "]");
  }
  if (x.size() != st.num_cols()) throw DimensionError("apply_partial: length mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(st.num_rows());
  for (int l = from; l < to; ++l) y += st.v(l).dot(x) * st.u(l);
  return y;
}

double partial_frobenius_sq(const AcaBlockState& st, int from, int to) {
  if (from < 0 || from > to || to > st.rank()) throw RangeError("invalid rank range");
  double s = 0.0;
  for (int l = from; l < to; ++l) {
    s += st.u(l).squaredNorm() * st.v(l).squaredNorm();
    for (int q = from; q < l; ++q) s += 2.0 * st.u(l).dot(st.u(q)) * st.v(l).dot(st.v(q));
  }
  return s;
}

}  // namespace baca
