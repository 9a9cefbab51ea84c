#include "baca/bem_kernel.hpp"

#include <cmath>
#include <numbers>

#include "baca/errors.hpp"
#include "baca/parallel.hpp"

namespace baca {

namespace {

constexpr double kInv4Pi = 0.25 / std::numbers::pi;

}  // namespace

double triangle_potential(const PanelGeometry& panel, const Vec3& x) {
  const Vec3& n = panel.unit_normal;
  const double h = n.dot(x - panel.edges[0].start);
  const double abs_h = std::abs(h);
  const Vec3 rho = x - h * n;
  double log_part = 0.0;
  double angle_part = 0.0;
  for (const auto& e : panel.edges) {
    const Vec3 to_start = e.start - rho;
    const double t0 = to_start.dot(e.outward_normal);  // > 0 on the panel side
    if (std::abs(t0) <= 1e-14 * e.length) continue;     // x above the edge line
    const double s_minus = to_start.dot(e.tangent);
    const double s_plus = s_minus + e.length;
    const double r0_sq = t0 * t0 + h * h;
    const double r_minus = (x - e.start).norm();
    const double r_plus = (x - e.start - e.length * e.tangent).norm();
    // R + s without cancellation for s < 0: (R + s)(R - s) = R0^2
    auto r_plus_s = [r0_sq](double s, double r) { return s >= 0.0 ? r + s : r0_sq / (r - s); };
    log_part += t0 * std::log(r_plus_s(s_plus, r_plus) / r_plus_s(s_minus, r_minus));
    if (abs_h > 0.0) {
      angle_part += std::atan(t0 * s_plus / (r0_sq + abs_h * r_plus)) -
                    std::atan(t0 * s_minus / (r0_sq + abs_h * r_minus));
    }
  }
  return log_part - abs_h * angle_part;
}

LaplaceSLP::LaplaceSLP(const TriMesh& mesh, QuadratureOptions options) : options_(options) {
  const std::size_t n = mesh.num_triangles();
  corners_.reserve(n);
  panels_.reserve(n);
  outer_.resize(n);
  outer_near_.resize(n);
  const auto& rule = triangle_rule(options_.outer_points);
  std::vector<PhysicalPoint> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    corners_.push_back(mesh.corners(i));
    panels_.push_back(panel_geometry(corners_.back()));
    map_rule(rule, corners_[i], outer_[i]);
    for (const auto& sub : subdivide(corners_[i], options_.near_depth)) {
      map_rule(rule, sub, scratch);
      outer_near_[i].insert(outer_near_[i].end(), scratch.begin(), scratch.end());
    }
  }
}

double LaplaceSLP::entry(int i, int j) const {
  const int test = std::min(i, j);
  const int trial = std::max(i, j);
  const auto& pt = panels_[test];
  const auto& ps = panels_[trial];
  const double reach = options_.near_factor * std::max(pt.diameter, ps.diameter);
  const bool near = test == trial || (pt.centroid - ps.centroid).squaredNorm() < reach * reach;
  double sum = 0.0;
  for (const auto& q : near ? outer_near_[test] : outer_[test]) {
    sum += q.weight * triangle_potential(ps, q.x);
  }
  return kInv4Pi * sum;
}

double winding_number(const TriMesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.num_triangles(); ++i) {
    const auto c = mesh.corners(i);
    const Vec3 a = c[0] - p, b = c[1] - p, d = c[2] - p;
    const double la = a.norm(), lb = b.norm(), ld = d.norm();
    const double num = a.dot(b.cross(d));
    const double den = la * lb * ld + a.dot(b) * ld + a.dot(d) * lb + b.dot(d) * la;
    total += 2.0 * std::atan2(num, den);
  }
  return total * kInv4Pi;
}

DirichletProblem::DirichletProblem(const TriMesh& mesh, const Vec3& source) : source_(source) {
  if (winding_number(mesh, source) > 0.25) {
    throw PreconditionError("source point must lie outside the surface");
  }
  for (const auto& v : mesh.vertices()) {
    if ((v - source).norm() == 0.0) throw PreconditionError("source point lies on the surface");
  }
}

double DirichletProblem::dirichlet(const Vec3& x) const {
  return kInv4Pi / (x - source_).norm();
}

double exact_neumann(const DirichletProblem& prob, const Vec3& x, const Vec3& n) {
  const Vec3 d = x - prob.source();
  const double r = d.norm();
  return -kInv4Pi * n.dot(d) / (r * r * r);
}

namespace {

// int over the sub-triangle of (g(y) - gx) * h / (4 pi |x-y|^3), refining the
// source triangle while x is close relative to its size.
double double_layer_part(const ScalarField& g, const std::array<Vec3, 3>& tri,
                         const Vec3& x, double gx, double h, const TriangleRule& rule,
                         int depth) {
  const Vec3 c = (tri[0] + tri[1] + tri[2]) / 3.0;
  const double diam = std::max({(tri[1] - tri[0]).norm(), (tri[2] - tri[1]).norm(),
                                (tri[0] - tri[2]).norm()});
  if (depth > 0 && (x - c).norm() < 2.0 * diam) {
    double sum = 0.0;
    for (const auto& sub : subdivide(tri, 1)) {
      sum += double_layer_part(g, sub, x, gx, h, rule, depth - 1);
    }
    return sum;
  }
  const Vec3 e1 = tri[1] - tri[0], e2 = tri[2] - tri[0];
  const double area = 0.5 * e1.cross(e2).norm();
  double sum = 0.0;
  for (const auto& q : rule) {
    const Vec3 y = tri[0] + q.xi * e1 + q.eta * e2;
    const double r = (x - y).norm();
    sum += q.weight * (g(y) - gx) / (r * r * r);
  }
  return kInv4Pi * h * area * sum;
}

}  // namespace

Eigen::VectorXd assemble_rhs(const TriMesh& mesh, const ScalarField& g,
                             const QuadratureOptions& options, int threads) {
  // K1 = -1/2 at face-interior points of a closed polyhedron:
  // (1/2 I + K) g (x) = K[g - g(x)](x).
  const int n = static_cast<int>(mesh.num_triangles());
  const auto& rule = triangle_rule(options.rhs_points);
  std::vector<std::array<Vec3, 3>> corners(n);
  std::vector<PanelGeometry> panels(n);
  for (int j = 0; j < n; ++j) {
    corners[j] = mesh.corners(j);
    panels[j] = panel_geometry(corners[j]);
  }
  Eigen::VectorXd b(n);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<PhysicalPoint> pts;
    map_rule(rule, corners[i], pts);
    double bi = 0.0;
    for (const auto& q : pts) {
      const double gx = g(q.x);
      double kx = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == static_cast<int>(i)) continue;  // kernel vanishes on its own panel
        const double h = panels[j].unit_normal.dot(q.x - corners[j][0]);
        if (h == 0.0) continue;
        kx += double_layer_part(g, corners[j], q.x, gx, h, rule, options.rhs_depth);
      }
      bi += q.weight * kx;
    }
    b[static_cast<Eigen::Index>(i)] = bi;
  });
  return b;
}

Eigen::VectorXd assemble_rhs(const TriMesh& mesh, const DirichletProblem& prob,
                             const QuadratureOptions& options, int threads) {
  return assemble_rhs(
      mesh, [&prob](const Vec3& x) { return prob.dirichlet(x); }, options, threads);
}

Eigen::VectorXd neumann_panel_means(const TriMesh& mesh, const DirichletProblem& prob,
                                    const QuadratureOptions& options) {
  const auto& rule = triangle_rule(options.error_points);
  Eigen::VectorXd means(mesh.num_triangles());
  std::vector<PhysicalPoint> pts;
  for (std::size_t i = 0; i < mesh.num_triangles(); ++i) {
    const auto c = mesh.corners(i);
    const auto g = panel_geometry(c);
    map_rule(rule, c, pts);
    double s = 0.0;
    for (const auto& q : pts) s += q.weight * exact_neumann(prob, q.x, g.unit_normal);
    means[static_cast<Eigen::Index>(i)] = s / g.area;
  }
  return means;
}

double relative_l2_error(const TriMesh& mesh, const Eigen::VectorXd& psi_h,
                         const DirichletProblem& prob, const QuadratureOptions& options) {
  if (psi_h.size() != static_cast<Eigen::Index>(mesh.num_triangles())) {
    throw DimensionError("coefficient vector length differs from the panel count");
  }
  const auto& rule = triangle_rule(options.error_points);
  double num = 0.0, den = 0.0;
  std::vector<PhysicalPoint> pts;
  for (std::size_t i = 0; i < mesh.num_triangles(); ++i) {
    const auto c = mesh.corners(i);
    const auto g = panel_geometry(c);
    map_rule(rule, c, pts);
    for (const auto& q : pts) {
      const double psi = exact_neumann(prob, q.x, g.unit_normal);
      const double diff = psi_h[static_cast<Eigen::Index>(i)] - psi;
      num += q.weight * diff * diff;
      den += q.weight * psi * psi;
    }
  }
  return std::sqrt(num / den);
}

Eigen::MatrixXd assemble_dense(const LaplaceSLP& op, int threads) {
  const int n = op.size();
  if (n > 4096) throw SizeError("dense assembly limited to N <= 4096");
  Eigen::MatrixXd a(n, n);
  parallel_for(n, threads, [&](std::size_t r) {
    const int i = static_cast<int>(r);
    for (int j = 0; j <= i; ++j) a(i, j) = op.entry(i, j);
  });
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i);
  }
  return a;
}

}  // namespace baca
