#include "fdstokes/study.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "fdstokes/quadrature.hpp"

namespace fdstokes {

double fit_slope(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size()) throw std::invalid_argument("fit_slope: length mismatch");
  if (h.size() < 2) throw std::invalid_argument("fit_slope: need at least two points");
  const double n = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0)) {
      throw std::invalid_argument("fit_slope: values must be positive");
    }
    sx += std::log(h[i]);
    sy += std::log(err[i]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err[i]) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: all h equal");
  return sxy / sxx;
}

Point exact_multiplier_integral(const ExactSolution& exact, const LevelSet& ls, int panels,
                                int points) {
  const auto rule = gauss_legendre(points);
  const double dt = 2.0 * std::numbers::pi / panels;
  Point sum = Point::Zero();
  for (int k = 0; k < panels; ++k) {
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = (k + rule.points[q]) * dt;
      const Point dir(std::cos(t), std::sin(t));
      const Point x = ls.center + ls.radius * dir;
      sum += rule.weights[q] * dt * ls.radius * exact.lambda(x, -dir);
    }
  }
  return sum;
}

ErrorRow compute_errors(const Discretization& disc, const Solution& sol, const ExactSolution& exact) {
  const auto& V = disc.velocity();
  const auto& Q = disc.pressure();
  const auto& L = disc.multiplier();
  const FluidQuadrature quad(disc.cut(), disc.degrees().error);
  const auto& elements = disc.cut().extended().members;

  // Fluid means of exact and discrete pressure.
  double area = 0.0, pe_int = 0.0, ph_int = 0.0;
  for (int t : elements) {
    const auto pn = Q.element_nodes(t);
    for (const auto& q : quad.points(t)) {
      const ShapeEval s = eval_at(Q, t, q.x);
      double ph = 0.0;
      for (int a = 0; a < s.count; ++a) ph += sol.P[Q.dof(pn[a], 0)] * s.value[a];
      area += q.w;
      pe_int += q.w * exact.p(q.x);
      ph_int += q.w * ph;
    }
  }
  const double pe_mean = pe_int / area;
  const double ph_mean = ph_int / area;

  double l2u = 0.0, h1u = 0.0, l2p = 0.0;
  for (int t : elements) {
    const auto vn = V.element_nodes(t);
    const auto pn = Q.element_nodes(t);
    for (const auto& q : quad.points(t)) {
      const ShapeEval sv = eval_at(V, t, q.x);
      const ShapeEval sp = eval_at(Q, t, q.x);
      Point uh = Point::Zero();
      Eigen::Matrix2d gh = Eigen::Matrix2d::Zero();
      for (int a = 0; a < sv.count; ++a) {
        for (int c = 0; c < 2; ++c) {
          const double coef = sol.U[V.dof(vn[a], c)];
          uh[c] += coef * sv.value[a];
          gh.row(c) += coef * sv.grad[a].transpose();
        }
      }
      double ph = 0.0;
      for (int a = 0; a < sp.count; ++a) ph += sol.P[Q.dof(pn[a], 0)] * sp.value[a];
      l2u += q.w * (exact.u(q.x) - uh).squaredNorm();
      h1u += q.w * (exact.grad_u(q.x) - gh).squaredNorm();
      const double dp = (exact.p(q.x) - pe_mean) - (ph - ph_mean);
      l2p += q.w * dp * dp;
    }
  }

  Point lam_h = Point::Zero();
  double lam_l2 = 0.0;
  for (int t : disc.cut().cut().members) {
    const auto ln = L.element_nodes(t);
    for (const auto& q : disc.interface_quadrature().points(t)) {
      const ShapeEval s = eval_at(L, t, q.x);
      Point lh = Point::Zero();
      for (int a = 0; a < s.count; ++a) {
        for (int c = 0; c < 2; ++c) lh[c] += sol.L[L.dof(ln[a], c)] * s.value[a];
      }
      lam_h += q.w * lh;
      lam_l2 += q.w * (exact.lambda(q.x, q.normal) - lh).squaredNorm();
    }
  }
  const Point lam_exact = exact_multiplier_integral(exact, disc.cut().level_set());

  ErrorRow row;
  row.n = disc.mesh().subdivisions();
  row.h = disc.h();
  row.l2_u = std::sqrt(l2u);
  row.h1_u = std::sqrt(h1u);
  row.l2_p = std::sqrt(l2p);
  row.lam_int = (lam_exact - lam_h).norm();
  row.lam_l2 = std::sqrt(lam_l2);
  row.pressure_mean = ph_int;
  row.residual = sol.relative_residual;
  row.bad_elements = disc.cut().good_bad().bad_count();
  row.unknowns = disc.layout().size();
  return row;
}

ErrorReport run_convergence_study(const MethodConfig& config, const std::vector<int>& n_list,
                                  const StudyOptions& options) {
  config.validate();
  const ExactSolution exact;
  const VectorField f = [&](const Point& x) { return exact.f(x); };
  const VectorField g = [&](const Point& x) { return exact.u(x); };

  ErrorReport report;
  for (int n : n_list) {
    ErrorRow row;
    row.n = n;
    try {
      const Discretization disc(n, options.level_set, options.subsegments, config.theta_min,
                                config.fe, options.degrees, options.policy);
      row.h = disc.h();
      row.bad_elements = disc.cut().good_bad().bad_count();
      const auto blocks = assemble_all(config, disc, f, g);
      const BlockSystem sys = build_system(config, disc, blocks, g);
      row.unknowns = sys.layout.size();
      if (options.on_system) options.on_system(n, sys);
      const Solution sol = solve(sys, options.least_squares_fallback);
      row = compute_errors(disc, sol, exact);
      row.singular = sol.singular;
      row.kernel_modes = sol.kernel_modes;
      row.failure = sol.diagnostic;
    } catch (const SolveError& e) {
      row.ok = false;
      row.failure = e.what();
    } catch (const NoGoodNeighborError& e) {
      row.ok = false;
      row.failure = e.what();
    }
    if (!row.ok) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.l2_u = row.h1_u = row.l2_p = row.lam_int = row.lam_l2 = nan;
    }
    if (options.probe_infsup && n <= kMaxInfSupMesh) {
      row.infsup = estimate_infsup(config, n, options.level_set, options.subsegments, options.degrees);
    }
    report.rows.push_back(row);
  }

  std::array<std::vector<double>, 4> cols;
  std::vector<double> hs;
  for (const auto& r : report.rows) {
    if (!r.ok) continue;
    hs.push_back(r.h);
    cols[0].push_back(r.l2_u);
    cols[1].push_back(r.h1_u);
    cols[2].push_back(r.l2_p);
    cols[3].push_back(r.lam_int);
  }
  for (int k = 0; k < 4; ++k) {
    report.slopes[k] = hs.size() >= 2 ? fit_slope(hs, cols[k]) : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

void write_csv(std::ostream& out, const ErrorReport& report, bool with_infsup) {
  out << "n,h,l2_u,h1_u,l2_p,lam_int";
  if (with_infsup) out << ",infsup";
  out << '\n';
  out << std::setprecision(10);
  for (const auto& r : report.rows) {
    out << r.n << ',' << r.h << ',' << r.l2_u << ',' << r.h1_u << ',' << r.l2_p << ',' << r.lam_int;
    if (with_infsup) out << ',' << r.infsup;
    out << '\n';
  }
  out << "slope,";
  for (int k = 0; k < 4; ++k) out << ',' << report.slopes[k];
  if (with_infsup) out << ',';
  out << '\n';
}

}  // namespace fdstokes
