#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fdstokes/mesh.hpp"

namespace fdstokes {

/// Scalar shape functions of one element evaluated at one point: values and
/// physical gradients, one entry per local node.
struct ShapeEval {
  int count = 0;
  std::array<double, 6> value{};
  std::array<Point, 6> grad{};
};

enum class Continuity { Default, Continuous, Discontinuous };

/// Lagrange space of degree 0, 1 or 2 with 1 or 2 components on a submesh.
///
/// Global nodes are numbered lexicographically by (x, y); vector DOFs are
/// node * components + component. Local DOF c * nodes_per_element() + a is
/// component c of local node a. Local nodes follow the triangle's vertex
/// order, then for P2 the midpoints of edges (0,1), (1,2), (2,0).
class FeSpace {
 public:
  /// `reconstruction` maps background triangle -> triangle whose polynomial
  /// is extended onto it; empty means identity. Throws std::invalid_argument
  /// on unsupported degree/components, an empty submesh, or a continuity
  /// request P0 cannot satisfy.
  FeSpace(const BackgroundMesh& mesh, const Submesh& submesh, int degree, int components,
          std::vector<int> reconstruction = {}, Continuity continuity = Continuity::Default);

  const BackgroundMesh& mesh() const { return *mesh_; }
  const Submesh& submesh() const { return *submesh_; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  bool continuous() const { return degree_ > 0; }

  int nodes_per_element() const { return degree_ == 0 ? 1 : (degree_ == 1 ? 3 : 6); }
  int dofs_per_element() const { return nodes_per_element() * components_; }
  int num_nodes() const { return static_cast<int>(node_points_.size()); }
  int num_dofs() const { return num_nodes() * components_; }

  bool contains(int t) const { return submesh_->contains(t); }
  std::span<const int> element_nodes(int t) const {
    return std::span<const int>(element_nodes_).subspan(static_cast<std::size_t>(t) * nodes_per_element(),
                                                        nodes_per_element());
  }
  int dof(int node, int component) const { return node * components_ + component; }
  /// DOFs of element t in local order.
  std::vector<int> element_dofs(int t) const;

  const Point& node_point(int node) const { return node_points_[node]; }
  /// DOFs whose node lies on the boundary of the unit square (continuous spaces).
  const std::vector<int>& wall_dofs() const { return wall_dofs_; }
  bool is_wall_dof(int dof) const { return wall_flag_[dof] != 0; }

  int reconstruction_target(int t) const { return reconstruction_.empty() ? t : reconstruction_[t]; }

 private:
  const BackgroundMesh* mesh_;
  const Submesh* submesh_;
  int degree_;
  int components_;
  std::vector<int> element_nodes_;
  std::vector<Point> node_points_;
  std::vector<int> wall_dofs_;
  std::vector<char> wall_flag_;
  std::vector<int> reconstruction_;
};

FeSpace build_space(const BackgroundMesh& mesh, const Submesh& submesh, int degree, int components,
                    std::vector<int> reconstruction = {});

/// Shape functions of element t at a point of the reference triangle.
/// Throws std::invalid_argument for points outside it beyond 1e-10.
ShapeEval eval_basis(const FeSpace& space, int t, const Point& reference);

/// Shape functions of element t's polynomials at physical point x, which may
/// lie outside t (polynomial extension).
ShapeEval eval_at(const FeSpace& space, int t, const Point& x);

struct ReconstructedEval {
  int element = -1;  // element whose DOFs the values refer to
  ShapeEval shape;
};

/// Basis of reconstruction_target(t) extended to x; identical to eval_at on
/// elements mapped to themselves.
ReconstructedEval eval_reconstructed(const FeSpace& space, int t, const Point& x);

/// Nodal interpolant; f(x, component). P0 uses the element centroid.
Eigen::VectorXd interpolate(const FeSpace& space,
                            const std::function<double(const Point&, int)>& f);

/// FE function value (component c) of coefficients on element t at x.
double evaluate(const FeSpace& space, const Eigen::VectorXd& coeffs, int t, const Point& x,
                int component);
/// FE function gradient (component c) of coefficients on element t at x.
Point evaluate_gradient(const FeSpace& space, const Eigen::VectorXd& coeffs, int t,
                        const Point& x, int component);

}  // namespace fdstokes
