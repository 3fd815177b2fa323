#include "fdstokes/fespace.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace fdstokes {

namespace {

struct Barycentric {
  std::array<double, 3> l;
  std::array<Point, 3> grad;
};

Barycentric barycentric(const BackgroundMesh& mesh, int t, const Point& x) {
  const auto v = mesh.triangle_points(t);
  const Point e1 = v[1] - v[0];
  const Point e2 = v[2] - v[0];
  const double det = e1.x() * e2.y() - e1.y() * e2.x();
  // Rows of the inverse Jacobian are the gradients of l1 and l2.
  const Point g1(e2.y() / det, -e2.x() / det);
  const Point g2(-e1.y() / det, e1.x() / det);
  const Point d = x - v[0];
  Barycentric b;
  b.l[1] = g1.dot(d);
  b.l[2] = g2.dot(d);
  b.l[0] = 1.0 - b.l[1] - b.l[2];
  b.grad = {-(g1 + g2), g1, g2};
  return b;
}

ShapeEval shape(int degree, const Barycentric& b) {
  ShapeEval s;
  if (degree == 0) {
    s.count = 1;
    s.value[0] = 1.0;
    s.grad[0] = Point::Zero();
    return s;
  }
  if (degree == 1) {
    s.count = 3;
    for (int i = 0; i < 3; ++i) {
      s.value[i] = b.l[i];
      s.grad[i] = b.grad[i];
    }
    return s;
  }
  s.count = 6;
  for (int i = 0; i < 3; ++i) {
    s.value[i] = b.l[i] * (2.0 * b.l[i] - 1.0);
    s.grad[i] = (4.0 * b.l[i] - 1.0) * b.grad[i];
  }
  for (int k = 0; k < 3; ++k) {
    const int i = k;
    const int j = (k + 1) % 3;
    s.value[3 + k] = 4.0 * b.l[i] * b.l[j];
    s.grad[3 + k] = 4.0 * (b.l[j] * b.grad[i] + b.l[i] * b.grad[j]);
  }
  return s;
}

}  // namespace

FeSpace::FeSpace(const BackgroundMesh& mesh, const Submesh& submesh, int degree, int components,
                 std::vector<int> reconstruction, Continuity continuity)
    : mesh_(&mesh), submesh_(&submesh), degree_(degree), components_(components),
      reconstruction_(std::move(reconstruction)) {
  if (degree < 0 || degree > 2) {
    throw std::invalid_argument("FE degree must be 0, 1 or 2, got " + std::to_string(degree));
  }
  if (components < 1 || components > 2) {
    throw std::invalid_argument("FE components must be 1 or 2");
  }
  if (degree == 0 && continuity == Continuity::Continuous) {
    throw std::invalid_argument("P0 space cannot be continuous");
  }
  if (degree > 0 && continuity == Continuity::Discontinuous) {
    throw std::invalid_argument("only continuous P1/P2 spaces are supported");
  }
  if (submesh.empty()) throw std::invalid_argument("FE space on an empty submesh");
  if (submesh.parent != &mesh) throw std::invalid_argument("submesh belongs to another mesh");
  if (!reconstruction_.empty() &&
      static_cast<int>(reconstruction_.size()) != mesh.num_triangles()) {
    throw std::invalid_argument("reconstruction map must cover every background triangle");
  }

  const int nloc = nodes_per_element();
  element_nodes_.assign(static_cast<std::size_t>(mesh.num_triangles()) * nloc, -1);
  const int n = mesh.subdivisions();

  if (degree == 0) {
    for (int t : submesh.members) {
      element_nodes_[static_cast<std::size_t>(t)] = num_nodes();
      const auto v = mesh.triangle_points(t);
      node_points_.push_back((v[0] + v[1] + v[2]) / 3.0);
    }
    wall_flag_.assign(num_dofs(), 0);
    return;
  }

  // Lattice coordinates with spacing 1/(degree*n); key orders by x then y.
  const int scale = degree;
  const int side = degree * n + 1;
  auto lattice_of_vertex = [&](int v) {
    const auto ij = mesh.vertex_lattice(v);
    return std::array<int, 2>{scale * ij[0], scale * ij[1]};
  };
  std::vector<std::array<int, 2>> local_keys(static_cast<std::size_t>(mesh.num_triangles()) * nloc);
  std::vector<char> used(static_cast<std::size_t>(side) * side, 0);
  for (int t : submesh.members) {
    const auto& tri = mesh.triangle(t);
    for (int a = 0; a < 3; ++a) local_keys[static_cast<std::size_t>(t) * nloc + a] = lattice_of_vertex(tri[a]);
    if (degree == 2) {
      for (int k = 0; k < 3; ++k) {
        const auto p = lattice_of_vertex(tri[k]);
        const auto q = lattice_of_vertex(tri[(k + 1) % 3]);
        local_keys[static_cast<std::size_t>(t) * nloc + 3 + k] = {(p[0] + q[0]) / 2, (p[1] + q[1]) / 2};
      }
    }
    for (int a = 0; a < nloc; ++a) {
      const auto& key = local_keys[static_cast<std::size_t>(t) * nloc + a];
      used[static_cast<std::size_t>(key[0]) * side + key[1]] = 1;
    }
  }

  std::vector<int> node_of(used.size(), -1);
  const double spacing = 1.0 / (scale * n);
  for (int x = 0; x < side; ++x) {
    for (int y = 0; y < side; ++y) {
      const std::size_t key = static_cast<std::size_t>(x) * side + y;
      if (!used[key]) continue;
      node_of[key] = num_nodes();
      node_points_.emplace_back(x * spacing, y * spacing);
      const bool wall = x == 0 || y == 0 || x == side - 1 || y == side - 1;
      if (wall) {
        for (int c = 0; c < components_; ++c) wall_dofs_.push_back(dof(num_nodes() - 1, c));
      }
    }
  }
  for (int t : submesh.members) {
    for (int a = 0; a < nloc; ++a) {
      const auto& key = local_keys[static_cast<std::size_t>(t) * nloc + a];
      element_nodes_[static_cast<std::size_t>(t) * nloc + a] =
          node_of[static_cast<std::size_t>(key[0]) * side + key[1]];
    }
  }
  wall_flag_.assign(num_dofs(), 0);
  for (int d : wall_dofs_) wall_flag_[d] = 1;
}

std::vector<int> FeSpace::element_dofs(int t) const {
  const auto nodes = element_nodes(t);
  std::vector<int> out;
  out.reserve(dofs_per_element());
  for (int c = 0; c < components_; ++c) {
    for (int node : nodes) out.push_back(dof(node, c));
  }
  return out;
}

FeSpace build_space(const BackgroundMesh& mesh, const Submesh& submesh, int degree, int components,
                    std::vector<int> reconstruction) {
  return FeSpace(mesh, submesh, degree, components, std::move(reconstruction));
}

ShapeEval eval_basis(const FeSpace& space, int t, const Point& reference) {
  constexpr double tol = 1e-10;
  if (!space.contains(t)) throw std::invalid_argument("element not in the space's submesh");
  if (reference.x() < -tol || reference.y() < -tol || reference.x() + reference.y() > 1.0 + tol) {
    throw std::invalid_argument("reference point outside the unit triangle");
  }
  const auto v = space.mesh().triangle_points(t);
  const Point x = v[0] + reference.x() * (v[1] - v[0]) + reference.y() * (v[2] - v[0]);
  return shape(space.degree(), barycentric(space.mesh(), t, x));
}

ShapeEval eval_at(const FeSpace& space, int t, const Point& x) {
  return shape(space.degree(), barycentric(space.mesh(), t, x));
}

ReconstructedEval eval_reconstructed(const FeSpace& space, int t, const Point& x) {
  const int target = space.reconstruction_target(t);
  return {target, eval_at(space, target, x)};
}

Eigen::VectorXd interpolate(const FeSpace& space,
                            const std::function<double(const Point&, int)>& f) {
  Eigen::VectorXd out(space.num_dofs());
  for (int node = 0; node < space.num_nodes(); ++node) {
    for (int c = 0; c < space.components(); ++c) out[space.dof(node, c)] = f(space.node_point(node), c);
  }
  return out;
}

double evaluate(const FeSpace& space, const Eigen::VectorXd& coeffs, int t, const Point& x,
                int component) {
  const ShapeEval s = eval_at(space, t, x);
  const auto nodes = space.element_nodes(t);
  double v = 0.0;
  for (int a = 0; a < s.count; ++a) v += coeffs[space.dof(nodes[a], component)] * s.value[a];
  return v;
}

Point evaluate_gradient(const FeSpace& space, const Eigen::VectorXd& coeffs, int t,
                        const Point& x, int component) {
  const ShapeEval s = eval_at(space, t, x);
  const auto nodes = space.element_nodes(t);
  Point g = Point::Zero();
  for (int a = 0; a < s.count; ++a) g += coeffs[space.dof(nodes[a], component)] * s.grad[a];
  return g;
}

}  // namespace fdstokes
