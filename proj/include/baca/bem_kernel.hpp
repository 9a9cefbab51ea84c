#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "baca/mesh.hpp"
#include "baca/quadrature.hpp"

namespace baca {

struct QuadratureOptions {
  int outer_points = 7;        // Gauss points on the test panel of a_ij
  int near_depth = 2;          // 1 -> 4 splits of the test panel for near pairs
  double near_factor = 2.0;    // near: centroid distance < near_factor * max diameter
  int rhs_points = 7;          // outer and inner rule for the double layer
  int rhs_depth = 3;           // recursive splits of near source panels
  int error_points = 12;       // rule for L2 norms on panels
};

/// Potential of a unit density on a flat triangle, int_T 1/|x - y| ds_y,
/// in closed form. Valid for every x, including points on the panel.
double triangle_potential(const PanelGeometry& panel, const Vec3& x);

/// Galerkin matrix of the single-layer operator with kernel 1/(4 pi |x-y|)
/// and piecewise constant basis functions. Pure and thread-safe.
class LaplaceSLP {
 public:
  explicit LaplaceSLP(const TriMesh& mesh, QuadratureOptions options = {});

  /// a_ij, evaluated with the smaller index as test panel so a_ij == a_ji.
  double entry(int i, int j) const;
  double operator()(int i, int j) const { return entry(i, j); }

  int size() const { return static_cast<int>(panels_.size()); }
  const PanelGeometry& panel(int i) const { return panels_[i]; }
  const QuadratureOptions& options() const { return options_; }

 private:
  QuadratureOptions options_;
  std::vector<std::array<Vec3, 3>> corners_;
  std::vector<PanelGeometry> panels_;
  std::vector<std::vector<PhysicalPoint>> outer_;       // regular test points
  std::vector<std::vector<PhysicalPoint>> outer_near_;  // subdivided test points
};

/// Interior Dirichlet problem with data g(x) = S(x - p) for a source p
/// outside the surface.
class DirichletProblem {
 public:
  /// Throws PreconditionError when p is not strictly outside the mesh.
  DirichletProblem(const TriMesh& mesh, const Vec3& source);

  const Vec3& source() const { return source_; }
  double dirichlet(const Vec3& x) const;

 private:
  Vec3 source_;
};

/// Generalised winding number of the closed mesh around p (1 inside, 0 outside).
double winding_number(const TriMesh& mesh, const Vec3& p);

/// Neumann trace of u(x) = S(x - p): -n.(x - p) / (4 pi |x - p|^3).
double exact_neumann(const DirichletProblem& prob, const Vec3& x, const Vec3& n);

using ScalarField = std::function<double(const Vec3&)>;

/// b_i = <(1/2 I + K) g, psi_i>, evaluated as <K[g - g(x)](x), psi_i> since
/// K1 = -1/2 on the faces of a closed polyhedron.
Eigen::VectorXd assemble_rhs(const TriMesh& mesh, const ScalarField& g,
                             const QuadratureOptions& options = {}, int threads = 1);
Eigen::VectorXd assemble_rhs(const TriMesh& mesh, const DirichletProblem& prob,
                             const QuadratureOptions& options = {}, int threads = 1);

/// Panel averages of the exact Neumann data (its L2 projection onto P0).
Eigen::VectorXd neumann_panel_means(const TriMesh& mesh, const DirichletProblem& prob,
                                    const QuadratureOptions& options = {});

/// ||psi_h - psi|| / ||psi|| in L2 of the surface.
double relative_l2_error(const TriMesh& mesh, const Eigen::VectorXd& psi_h,
                         const DirichletProblem& prob, const QuadratureOptions& options = {});

/// Full Galerkin matrix; throws SizeError for N > 4096.
Eigen::MatrixXd assemble_dense(const LaplaceSLP& op, int threads = 1);

}  // namespace baca
