#include <doctest.h>

#include <cmath>

#include "baca/errors.hpp"
#include "baca/quadrature.hpp"

using namespace baca;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// mean of xi^a eta^b over the reference triangle
double monomial_mean(int a, int b) { return 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2); }

double rule_mean(const TriangleRule& rule, int a, int b) {
  double s = 0.0;
  for (const auto& q : rule) s += q.weight * std::pow(q.xi, a) * std::pow(q.eta, b);
  return s;
}

}  // namespace

TEST_CASE("triangle rules integrate polynomials up to their degree") {
  for (int n : {1, 3, 6, 7, 12}) {
    const auto& rule = triangle_rule(n);
    CHECK(rule.size() == static_cast<std::size_t>(n));
    const int deg = triangle_rule_degree(n);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        CHECK(rule_mean(rule, a, b) == doctest::Approx(monomial_mean(a, b)).epsilon(1e-13));
      }
    }
    for (const auto& q : rule) {
      CHECK(q.xi > 0.0);
      CHECK(q.eta > 0.0);
      CHECK(q.xi + q.eta < 1.0);
    }
  }
  CHECK_THROWS_AS(triangle_rule(5), PreconditionError);
}

TEST_CASE("Gauss-Legendre on [0,1]") {
  for (int n = 1; n <= 10; ++n) {
    const auto g = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (auto [x, w] : g) s += w * std::pow(x, k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("collapsed rule") {
  for (int n = 1; n <= 6; ++n) {
    const auto rule = collapsed_gauss_rule(n);
    for (int a = 0; a <= 2 * n - 2; ++a) {
      for (int b = 0; a + b <= 2 * n - 2; ++b) {
        CHECK(rule_mean(rule, a, b) == doctest::Approx(monomial_mean(a, b)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mapping and subdivision preserve area") {
  const std::array<Vec3, 3> tri{Vec3(0, 0, 0), Vec3(2, 0, 1), Vec3(0, 3, 0)};
  const double area = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]).norm();
  std::vector<PhysicalPoint> pts;
  map_rule(triangle_rule(7), tri, pts);
  double s = 0.0;
  Vec3 first = Vec3::Zero();
  for (const auto& p : pts) {
    s += p.weight;
    first += p.weight * p.x;
  }
  CHECK(s == doctest::Approx(area).epsilon(1e-14));
  const Vec3 centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
  CHECK((first / area - centroid).norm() < 1e-14);

  for (int d = 0; d <= 3; ++d) {
    const auto subs = subdivide(tri, d);
    CHECK(subs.size() == static_cast<std::size_t>(1) << (2 * d));
    double a = 0.0;
    for (const auto& t : subs) a += 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm();
    CHECK(a == doctest::Approx(area).epsilon(1e-13));
  }
}
