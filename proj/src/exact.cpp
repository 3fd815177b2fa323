#include "fdstokes/exact.hpp"

#include <cmath>
#include <numbers>

namespace fdstokes {

namespace {
constexpr double pi = std::numbers::pi;
}

Point ExactSolution::u(const Point& x) const {
  return {std::cos(pi * x.x()) * std::sin(pi * x.y()), -std::sin(pi * x.x()) * std::cos(pi * x.y())};
}

Eigen::Matrix2d ExactSolution::grad_u(const Point& x) const {
  const double cx = std::cos(pi * x.x());
  const double sx = std::sin(pi * x.x());
  const double cy = std::cos(pi * x.y());
  const double sy = std::sin(pi * x.y());
  Eigen::Matrix2d g;
  g << -pi * sx * sy, pi * cx * cy,
       -pi * cx * cy, pi * sx * sy;
  return g;
}

double ExactSolution::p(const Point& x) const {
  return (x.y() - 0.5) * std::cos(2.0 * pi * x.x()) + (x.x() - 0.5) * std::sin(2.0 * pi * x.y());
}

Point ExactSolution::grad_p(const Point& x) const {
  return {-2.0 * pi * (x.y() - 0.5) * std::sin(2.0 * pi * x.x()) + std::sin(2.0 * pi * x.y()),
          std::cos(2.0 * pi * x.x()) + 2.0 * pi * (x.x() - 0.5) * std::cos(2.0 * pi * x.y())};
}

Point ExactSolution::f(const Point& x) const { return 2.0 * pi * pi * u(x) + grad_p(x); }

Point ExactSolution::lambda(const Point& x, const Point& n) const {
  const Eigen::Matrix2d g = grad_u(x);
  const Eigen::Matrix2d sym = g + g.transpose();
  return -sym * n + p(x) * n;
}

}  // namespace fdstokes
