#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "fdstokes/geometry.hpp"
#include "fdstokes/mesh.hpp"
#include "fdstokes/parallel.hpp"

namespace fdstokes {

/// Rule on the unit triangle {(0,0),(1,0),(0,1)}; points are barycentric
/// (l0, l1, l2) with physical point l0*v0 + l1*v1 + l2*v2. Weights sum to 1/2.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int exactness_degree = 0;
};

/// Rule on [0, 1]; weights sum to 1.
struct SegmentRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness_degree = 0;
};

/// Symmetric rule with positive weights, exact to at least `degree`
/// (1 <= degree <= 6). Throws std::invalid_argument otherwise.
TriangleRule triangle_rule(int degree);

/// Gauss-Legendre rule exact to at least `degree` (degree >= 0).
SegmentRule segment_rule(int degree);
/// Gauss-Legendre rule with `npoints` points.
SegmentRule gauss_legendre(int npoints);

struct QuadPoint {
  Point x;
  double w;
};

struct InterfacePoint {
  Point x;
  double w;
  Point normal;  // unit, out of the fluid
};

/// Fluid-domain quadrature: full rule on interior triangles, the rule mapped
/// onto each fluid sub-triangle of cut triangles, nothing on exterior ones.
class FluidQuadrature {
 public:
  FluidQuadrature(const CutGeometry& cut, int degree);

  std::span<const QuadPoint> points(int triangle) const;
  int degree() const { return degree_; }

 private:
  int degree_;
  std::vector<int> offsets_;
  std::vector<QuadPoint> points_;
};

/// Quadrature over the interface polylines of every cut triangle.
class InterfaceQuadrature {
 public:
  InterfaceQuadrature(const CutGeometry& cut, int degree);

  std::span<const InterfacePoint> points(int triangle) const;
  int degree() const { return degree_; }

 private:
  int degree_;
  std::vector<int> offsets_;
  std::vector<InterfacePoint> points_;
};

/// Full-triangle quadrature points for triangle t (used for bulk
/// stabilizations on unclipped elements).
std::vector<QuadPoint> full_triangle_points(const BackgroundMesh& mesh, int t,
                                            const TriangleRule& rule);

double integrate_fluid(const CutGeometry& cut, const std::function<double(const Point&)>& f,
                       int degree, ExecPolicy policy = ExecPolicy::Serial);

double integrate_interface(const CutGeometry& cut,
                           const std::function<double(const Point&, const Point&)>& f,
                           int degree, ExecPolicy policy = ExecPolicy::Serial);

}  // namespace fdstokes
