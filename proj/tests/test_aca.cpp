#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "baca/aca.hpp"
#include "baca/errors.hpp"

using namespace baca;

namespace {

std::vector<int> iota(int n, int start = 0) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), start);
  return v;
}

// Smooth kernel between two separated point clouds on a line.
EntryOracle separated_kernel() {
  return [](int i, int j) {
    const double x = 0.01 * i;
    const double y = 3.0 + 0.013 * j;
    return 1.0 / std::abs(x - y);
  };
}

Eigen::MatrixXd materialise(const EntryOracle& f, const std::vector<int>& r,
                            const std::vector<int>& c) {
  Eigen::MatrixXd a(r.size(), c.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) a(i, j) = f(r[i], c[j]);
  }
  return a;
}

}  // namespace

TEST_CASE("stopping factor") {
  CHECK(aca_stopping_factor(1e-6, 0.8) == doctest::Approx(1.9999998e-7).epsilon(1e-12));
  CHECK(aca_stopping_factor(1e-4, 0.0) == doctest::Approx(1e-4 / 1.0001));
}

TEST_CASE("rank-one block") {
  const EntryOracle f = [](int i, int j) { return (1.0 + i) * (2.0 - 0.1 * j); };
  AcaBlockState st(iota(12), iota(9));
  aca_advance(st, f, 100, 1e-10, 0.5);
  CHECK(st.status() == AcaStatus::converged);
  CHECK(st.rank() == 1);
  const Eigen::MatrixXd a = materialise(f, st.rows(), st.cols());
  CHECK((low_rank_eval(st) - a).norm() <= 1e-14 * a.norm());
}

TEST_CASE("smooth block is approximated to the requested accuracy") {
  const auto f = separated_kernel();
  const auto rows = iota(40), cols = iota(30, 5);
  const Eigen::MatrixXd a = materialise(f, rows, cols);
  for (double eps : {1e-3, 1e-6, 1e-9}) {
    AcaBlockState st(rows, cols);
    aca_advance(st, f, 1000, eps, 0.0);
    REQUIRE(st.status() == AcaStatus::converged);
    CHECK(st.rank() < 15);
    CHECK((a - low_rank_eval(st)).norm() <= 10.0 * eps * a.norm());
  }
}

TEST_CASE("cross approximation interpolates pivot rows and columns") {
  const auto f = separated_kernel();
  AcaBlockState st(iota(40), iota(30));
  aca_advance(st, f, 5, 1e-12, 0.0);
  REQUIRE(st.rank() == 5);
  const Eigen::MatrixXd a = materialise(f, st.rows(), st.cols());
  const Eigen::MatrixXd s = low_rank_eval(st);
  for (int l = 0; l < st.rank(); ++l) {
    const int i = st.row_pivots()[l], j = st.col_pivots()[l];
    CHECK(st.v(l)[j] == 1.0);
    CHECK((a.row(i) - s.row(i)).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
    CHECK((a.col(j) - s.col(j)).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
  }
  CHECK(st.used_count() >= st.rank());
  CHECK(st.row_pivots()[0] == 0);
}

TEST_CASE("Frobenius norm bookkeeping") {
  const auto f = separated_kernel();
  AcaBlockState st(iota(25), iota(35));
  for (int step = 0; step < 6 && st.status() == AcaStatus::active; ++step) {
    aca_advance(st, f, 1, 1e-14, 0.0);
    const double direct = low_rank_eval(st).squaredNorm();
    CHECK(st.norm_sq() == doctest::Approx(direct).epsilon(1e-12));
    CHECK(partial_frobenius_sq(st, 0, st.rank()) == doctest::Approx(direct).epsilon(1e-12));
  }
  const int r = st.rank();
  for (int q = 0; q <= r; ++q) {
    Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(25, 35);
    for (int l = q; l < r; ++l) tail += st.u(l) * st.v(l).transpose();
    CHECK(partial_frobenius_sq(st, q, r) == doctest::Approx(tail.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("exact low-rank matrices are reproduced") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int k : {1, 2, 3, 5}) {
    const Eigen::MatrixXd u = Eigen::MatrixXd::NullaryExpr(30, k, [&] { return g(rng); });
    const Eigen::MatrixXd v = Eigen::MatrixXd::NullaryExpr(26, k, [&] { return g(rng); });
    const Eigen::MatrixXd a = u * v.transpose();
    const EntryOracle f = [&](int i, int j) { return a(i, j); };
    AcaBlockState st(iota(30), iota(26));
    aca_advance(st, f, 100, 1e-12, 0.0);
    CHECK(st.rank() <= k + 1);
    CHECK(st.status() != AcaStatus::densified);
    CHECK((a - low_rank_eval(st)).norm() <= 1e-10 * a.norm());
  }
}

TEST_CASE("resumable steps equal a single run") {
  const auto f = separated_kernel();
  AcaBlockState once(iota(40), iota(30)), steps(iota(40), iota(30));
  aca_advance(once, f, 6, 1e-14, 0.0);
  for (int i = 0; i < 6; ++i) aca_advance(steps, f, 1, 1e-14, 0.0);
  REQUIRE(once.rank() == steps.rank());
  for (int l = 0; l < once.rank(); ++l) {
    CHECK(once.u(l) == steps.u(l));
    CHECK(once.v(l) == steps.v(l));
  }
  CHECK(once.entries() == steps.entries());
}

TEST_CASE("partial products telescope") {
  const auto f = separated_kernel();
  AcaBlockState st(iota(20), iota(15));
  aca_advance(st, f, 5, 1e-14, 0.0);
  const int r = st.rank();
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(15, -1.0, 2.0);
  for (int q = 0; q <= r; ++q) {
    const Eigen::VectorXd sum = apply_partial(st, x, 0, q) + apply_partial(st, x, q, r);
    CHECK((sum - low_rank_eval(st) * x).norm() <= 1e-13 * (low_rank_eval(st) * x).norm());
  }
  CHECK(apply_partial(st, x, 2, 2).norm() == 0.0);
  CHECK_THROWS_AS(apply_partial(st, x, 3, 2), RangeError);
  CHECK_THROWS_AS(apply_partial(st, x, 0, r + 1), RangeError);
  CHECK_THROWS_AS(apply_partial(st, Eigen::VectorXd::Zero(3), 0, r), DimensionError);
}

TEST_CASE("incompressible blocks are densified") {
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  const Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(12, 10, [&] { return g(rng); });
  const EntryOracle f = [&](int i, int j) { return a(i, j); };
  AcaBlockState st(iota(12), iota(10));
  aca_advance(st, f, 100, 1e-8, 0.5);
  CHECK(st.status() == AcaStatus::densified);
  CHECK(st.rank() == 6);
  CHECK(st.dense() == a);
  CHECK(st.entries() == 6u * (12 + 10) + 120u);
  CHECK_THROWS_AS(aca_advance(st, f, 1, 1e-8, 0.5), PreconditionError);
}

TEST_CASE("zero block and single row") {
  const EntryOracle zero = [](int, int) { return 0.0; };
  AcaBlockState st(iota(4), iota(7));
  aca_advance(st, zero, 100, 1e-6, 0.5);
  CHECK(st.status() == AcaStatus::exhausted);
  CHECK(st.rank() == 0);
  CHECK(st.used_count() == 4);

  const EntryOracle f = [](int i, int j) { return 1.0 + i + j; };
  AcaBlockState one(iota(1), iota(5));
  aca_advance(one, f, 100, 1e-6, 0.5);
  CHECK(is_terminal(one.status()));
  CHECK((low_rank_eval(one) - materialise(f, one.rows(), one.cols())).norm() < 1e-14);

  CHECK_THROWS_AS(AcaBlockState({}, iota(3)), PreconditionError);
}
