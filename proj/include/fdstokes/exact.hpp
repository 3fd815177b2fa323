#pragma once

#include <Eigen/Core>

#include "fdstokes/mesh.hpp"

namespace fdstokes {

/// Manufactured Stokes solution on the unit square with viscosity 1 and
/// stress 2D(u) - pI:
///   u = (cos(pi x) sin(pi y), -sin(pi x) cos(pi y)),
///   p = (y - 1/2) cos(2 pi x) + (x - 1/2) sin(2 pi y),
///   f = 2 pi^2 u + grad p.
struct ExactSolution {
  Point u(const Point& x) const;
  /// Row c holds grad u_c.
  Eigen::Matrix2d grad_u(const Point& x) const;
  double p(const Point& x) const;
  Point grad_p(const Point& x) const;
  Point f(const Point& x) const;
  /// Multiplier -2D(u)n + p n for unit normal n.
  Point lambda(const Point& x, const Point& n) const;
};

}  // namespace fdstokes
