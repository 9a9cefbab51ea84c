#include "baca/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "baca/errors.hpp"

namespace baca {

namespace {

void add_orbit3(TriangleRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.push_back({a, a, w});
  r.push_back({b, a, w});
  r.push_back({a, b, w});
}

void add_orbit6(TriangleRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.push_back({a, b, w});
  r.push_back({b, a, w});
  r.push_back({a, c, w});
  r.push_back({c, a, w});
  r.push_back({b, c, w});
  r.push_back({c, b, w});
}

TriangleRule make_rule(int points) {
  TriangleRule r;
  switch (points) {
    case 1:
      r.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0});
      break;
    case 3:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 6:
      add_orbit3(r, 0.445948490915965, 0.223381589678011);
      add_orbit3(r, 0.091576213509771, 0.109951743655322);
      break;
    case 7: {
      const double s = std::sqrt(15.0);
      r.push_back({1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0});
      add_orbit3(r, (6.0 - s) / 21.0, (155.0 - s) / 1200.0);
      add_orbit3(r, (6.0 + s) / 21.0, (155.0 + s) / 1200.0);
      break;
    }
    case 12:
      add_orbit3(r, 0.249286745170910, 0.116786275726379);
      add_orbit3(r, 0.063089014491502, 0.050844906370207);
      add_orbit6(r, 0.310352451033784, 0.053145049844817, 0.082851075618374);
      break;
    default:
      throw PreconditionError("no triangle rule with " + std::to_string(points) + " points");
  }
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int points) {
  static const std::array<TriangleRule, 5> rules = {make_rule(1), make_rule(3), make_rule(6),
                                                     make_rule(7), make_rule(12)};
  switch (points) {
    case 1: return rules[0];
    case 3: return rules[1];
    case 6: return rules[2];
    case 7: return rules[3];
    case 12: return rules[4];
    default:
      throw PreconditionError("no triangle rule with " + std::to_string(points) + " points");
  }
}

int triangle_rule_degree(int points) {
  switch (points) {
    case 1: return 1;
    case 3: return 2;
    case 6: return 4;
    case 7: return 5;
    case 12: return 6;
    default:
      throw PreconditionError("no triangle rule with " + std::to_string(points) + " points");
  }
}

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  if (n < 1) throw PreconditionError("Gauss-Legendre order must be positive");
  std::vector<std::pair<double, double>> nodes(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = {0.5 * (1.0 - x), 0.5 * w};
  }
  return nodes;
}

TriangleRule collapsed_gauss_rule(int n) {
  const auto gl = gauss_legendre(n);
  TriangleRule r;
  r.reserve(static_cast<std::size_t>(n) * n);
  for (const auto& [u, wu] : gl) {
    for (const auto& [v, wv] : gl) {
      // (u, v) in the unit square -> (xi, eta) = (u, (1-u) v), Jacobian 1-u
      r.push_back({u, (1.0 - u) * v, 2.0 * wu * wv * (1.0 - u)});
    }
  }
  return r;
}

void map_rule(const TriangleRule& rule, const std::array<Vec3, 3>& c,
              std::vector<PhysicalPoint>& out) {
  const Vec3 e1 = c[1] - c[0];
  const Vec3 e2 = c[2] - c[0];
  const double area = 0.5 * e1.cross(e2).norm();
  out.clear();
  out.reserve(rule.size());
  for (const auto& q : rule) out.push_back({c[0] + q.xi * e1 + q.eta * e2, q.weight * area});
}

std::vector<std::array<Vec3, 3>> subdivide(const std::array<Vec3, 3>& corners, int depth) {
  std::vector<std::array<Vec3, 3>> tris{corners};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::array<Vec3, 3>> next;
    next.reserve(4 * tris.size());
    for (const auto& [a, b, c] : tris) {
      const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  return tris;
}

}  // namespace baca
