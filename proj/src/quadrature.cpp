#include "fdstokes/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fdstokes {

namespace {

void add_centroid(TriangleRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.5 * w);
}

// Orbit (a, a, 1-2a): three points.
void add_orbit3(TriangleRule& r, double w, double a) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({a, a, b});
  r.points.push_back({a, b, a});
  r.points.push_back({b, a, a});
  for (int i = 0; i < 3; ++i) r.weights.push_back(0.5 * w);
}

// Orbit (a, b, 1-a-b): six points.
void add_orbit6(TriangleRule& r, double w, double a, double b) {
  const double c = 1.0 - a - b;
  const std::array<std::array<double, 3>, 6> perms{{{a, b, c}, {a, c, b}, {b, a, c},
                                                    {b, c, a}, {c, a, b}, {c, b, a}}};
  for (const auto& p : perms) {
    r.points.push_back(p);
    r.weights.push_back(0.5 * w);
  }
}

}  // namespace

TriangleRule triangle_rule(int degree) {
  TriangleRule r;
  switch (degree) {
    case 1:
      add_centroid(r, 1.0);
      r.exactness_degree = 1;
      break;
    case 2:
      add_orbit3(r, 1.0 / 3.0, 1.0 / 6.0);
      r.exactness_degree = 2;
      break;
    case 3:
    case 4:
      add_orbit3(r, 0.223381589678011465695007008433, 0.445948490915964886318329253883);
      add_orbit3(r, 0.109951743655321867638326324900, 0.091576213509770743459571463402);
      r.exactness_degree = 4;
      break;
    case 5: {
      const double s = std::sqrt(15.0);
      add_centroid(r, 9.0 / 40.0);
      add_orbit3(r, (155.0 - s) / 1200.0, (6.0 - s) / 21.0);
      add_orbit3(r, (155.0 + s) / 1200.0, (6.0 + s) / 21.0);
      r.exactness_degree = 5;
      break;
    }
    case 6:
      add_orbit3(r, 0.116786275726379366025289611374, 0.249286745170910421291638553114);
      add_orbit3(r, 0.050844906370206816920936809105, 0.063089014491502228340331602870);
      add_orbit6(r, 0.082851075618373575193553456427, 0.053145049844816947353249671636,
                 0.310352451033784405416607733951);
      r.exactness_degree = 6;
      break;
    default:
      throw std::invalid_argument("triangle rule degree must be in [1, 6], got " +
                                  std::to_string(degree));
  }
  return r;
}

SegmentRule gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("Gauss rule needs at least one point");
  SegmentRule r;
  r.points.resize(npoints);
  r.weights.resize(npoints);
  const int n = npoints;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
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
    r.points[i] = 0.5 * (1.0 - x);
    r.points[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[i] = 0.5 * w;
    r.weights[n - 1 - i] = 0.5 * w;
  }
  r.exactness_degree = 2 * n - 1;
  return r;
}

SegmentRule segment_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("segment rule degree must be >= 0");
  return gauss_legendre(std::max(1, (degree + 2) / 2));
}

std::vector<QuadPoint> full_triangle_points(const BackgroundMesh& mesh, int t,
                                            const TriangleRule& rule) {
  const auto v = mesh.triangle_points(t);
  const double jac = 2.0 * mesh.triangle_area(t);
  std::vector<QuadPoint> out;
  out.reserve(rule.weights.size());
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const auto& l = rule.points[q];
    out.push_back({l[0] * v[0] + l[1] * v[1] + l[2] * v[2], rule.weights[q] * jac});
  }
  return out;
}

FluidQuadrature::FluidQuadrature(const CutGeometry& cut, int degree) : degree_(degree) {
  const auto rule = triangle_rule(degree);
  const auto& mesh = cut.mesh();
  offsets_.assign(mesh.num_triangles() + 1, 0);
  auto map_rule = [&](const TrianglePoints& v) {
    const double jac = (v[1] - v[0]).x() * (v[2] - v[0]).y() - (v[1] - v[0]).y() * (v[2] - v[0]).x();
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& l = rule.points[q];
      points_.push_back({l[0] * v[0] + l[1] * v[1] + l[2] * v[2], rule.weights[q] * jac});
    }
  };
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (cut.tag(t) == ElementTag::Interior) {
      map_rule(mesh.triangle_points(t));
    } else if (const CutCell* c = cut.cell(t)) {
      for (const auto& ft : c->fluid_triangles) map_rule(ft);
    }
    offsets_[t + 1] = static_cast<int>(points_.size());
  }
}

std::span<const QuadPoint> FluidQuadrature::points(int triangle) const {
  return std::span<const QuadPoint>(points_).subspan(offsets_[triangle],
                                                     offsets_[triangle + 1] - offsets_[triangle]);
}

InterfaceQuadrature::InterfaceQuadrature(const CutGeometry& cut, int degree) : degree_(degree) {
  const auto rule = segment_rule(degree);
  const auto& mesh = cut.mesh();
  offsets_.assign(mesh.num_triangles() + 1, 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (const CutCell* c = cut.cell(t)) {
      for (const auto& s : c->interface) {
        const double len = s.length();
        const Point n = s.normal();
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
          const double u = rule.points[q];
          points_.push_back({(1.0 - u) * s.a + u * s.b, rule.weights[q] * len, n});
        }
      }
    }
    offsets_[t + 1] = static_cast<int>(points_.size());
  }
}

std::span<const InterfacePoint> InterfaceQuadrature::points(int triangle) const {
  return std::span<const InterfacePoint>(points_).subspan(
      offsets_[triangle], offsets_[triangle + 1] - offsets_[triangle]);
}

double integrate_fluid(const CutGeometry& cut, const std::function<double(const Point&)>& f,
                       int degree, ExecPolicy policy) {
  const FluidQuadrature quad(cut, degree);
  return reduce_elements(cut.extended().members, policy, [&](int t) {
    double s = 0.0;
    for (const auto& q : quad.points(t)) s += q.w * f(q.x);
    return s;
  });
}

double integrate_interface(const CutGeometry& cut,
                           const std::function<double(const Point&, const Point&)>& f,
                           int degree, ExecPolicy policy) {
  const InterfaceQuadrature quad(cut, degree);
  return reduce_elements(cut.cut().members, policy, [&](int t) {
    double s = 0.0;
    for (const auto& q : quad.points(t)) s += q.w * f(q.x, q.normal);
    return s;
  });
}

}  // namespace fdstokes
