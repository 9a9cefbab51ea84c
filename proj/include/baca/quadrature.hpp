#pragma once

#include <array>
#include <vector>

#include "baca/mesh.hpp"

namespace baca {

struct QuadPoint {
  double xi, eta;  // barycentric coordinates of corners 1 and 2
  double weight;   // normalised: weights sum to 1
};

using TriangleRule = std::vector<QuadPoint>;

/// Symmetric Gauss rules on the reference triangle. Supported sizes and
/// polynomial degrees: 1 (1), 3 (2), 6 (4), 7 (5), 12 (6).
const TriangleRule& triangle_rule(int points);

/// Highest degree integrated exactly by triangle_rule(points).
int triangle_rule_degree(int points);

/// Gauss-Legendre nodes and weights on [0, 1].
std::vector<std::pair<double, double>> gauss_legendre(int n);

/// Tensor Gauss-Legendre rule collapsed onto the triangle (Duffy map);
/// n*n points, exact up to degree 2n-2.
TriangleRule collapsed_gauss_rule(int n);

struct PhysicalPoint {
  Vec3 x;
  double weight;  // includes the panel area
};

/// Maps `rule` onto the triangle with the given corners.
void map_rule(const TriangleRule& rule, const std::array<Vec3, 3>& corners,
              std::vector<PhysicalPoint>& out);

/// Regular 1 -> 4 subdivision, `depth` times; returns 4^depth triangles.
std::vector<std::array<Vec3, 3>> subdivide(const std::array<Vec3, 3>& corners, int depth);

}  // namespace baca
