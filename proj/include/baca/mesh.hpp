#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace baca {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

/// Analytic surface a mesh approximates. Refinement projects new vertices
/// back onto it.
struct SurfaceTag {
  enum class Kind { none, sphere, ellipsoid };
  Kind kind = Kind::none;
  Vec3 semiaxes = Vec3::Ones();  // sphere: all three equal the radius

  static SurfaceTag sphere(double radius) { return {Kind::sphere, Vec3::Constant(radius)}; }
  static SurfaceTag ellipsoid(const Vec3& axes) { return {Kind::ellipsoid, axes}; }

  /// Maps a point onto the surface along the ray from the origin.
  Vec3 project(const Vec3& p) const;
};

/// Closed triangulated surface; triangle i is the support of basis function i.
/// Triangles are counter-clockwise when seen from outside.
class TriMesh {
 public:
  TriMesh() = default;
  /// Throws GeometryError on out-of-range indices or zero-area triangles.
  TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles, SurfaceTag tag = {});

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
  const Triangle& triangle(std::size_t i) const { return triangles_[i]; }
  const SurfaceTag& surface() const { return tag_; }

  std::array<Vec3, 3> corners(std::size_t i) const {
    const auto& t = triangles_[i];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
  }

  bool operator==(const TriMesh& o) const {
    return vertices_ == o.vertices_ && triangles_ == o.triangles_;
  }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  SurfaceTag tag_;
};

/// Per-edge frame of a flat panel: edge k runs from corner k to corner k+1.
struct EdgeFrame {
  Vec3 start;
  Vec3 tangent;         // unit, along the edge
  Vec3 outward_normal;  // unit, in-plane, pointing away from the panel
  double length = 0.0;
};

struct PanelGeometry {
  double area = 0.0;
  Vec3 centroid;
  Vec3 unit_normal;
  double diameter = 0.0;  // longest edge
  std::array<EdgeFrame, 3> edges;
};

/// Throws RangeError for i >= N and GeometryError for degenerate panels.
PanelGeometry panel_geometry(const TriMesh& mesh, std::size_t i);
PanelGeometry panel_geometry(const std::array<Vec3, 3>& corners);

/// Every edge shared by exactly two triangles traversing it in opposite
/// directions.
bool is_closed(const TriMesh& mesh);
double signed_volume(const TriMesh& mesh);
double surface_area(const TriMesh& mesh);

/// Subdivided icosahedron projected onto a sphere; 20*4^level triangles.
/// level > 7 throws SizeError.
TriMesh generate_icosphere(int level, double radius = 1.0);

/// Scales a unit-sphere mesh to the ellipsoid with the given semi-axes.
/// Throws PreconditionError unless every vertex satisfies |x| = 1 +- 1e-9.
TriMesh map_to_ellipsoid(const TriMesh& mesh, const Vec3& semiaxes);

/// Splits (1 -> 4) every triangle whose centroid satisfies `marked`, then
/// closes the mesh by longest-edge bisection of the neighbours. New vertices
/// are projected onto the tagged surface. Requires a closed mesh and
/// rounds <= 6.
TriMesh refine_region(const TriMesh& mesh, const std::function<bool(const Vec3&)>& marked,
                      int rounds);

TriMesh load_off(const std::string& path);
void save_off(const TriMesh& mesh, const std::string& path);
TriMesh read_off(std::istream& in);
void write_off(const TriMesh& mesh, std::ostream& out);

}  // namespace baca
