#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fdstokes/assembly.hpp"
#include "fdstokes/exact.hpp"
#include "fdstokes/geometry.hpp"
#include "fdstokes/solver.hpp"

namespace fdstokes {

/// One mesh of a convergence sweep. Error fields are NaN when ok is false.
struct ErrorRow {
  int n = 0;
  double h = 0.0;
  double l2_u = 0.0;
  double h1_u = 0.0;
  double l2_p = 0.0;
  double lam_int = 0.0;
  /// Pointwise ||lambda - lambda_h||_{0,Gamma_h}; informational.
  double lam_l2 = 0.0;
  double pressure_mean = 0.0;
  double residual = 0.0;
  int bad_elements = 0;
  int unknowns = 0;
  double infsup = std::numeric_limits<double>::quiet_NaN();
  bool ok = true;
  /// Direct solve failed; errors come from the least-squares solution.
  bool singular = false;
  /// Structural kernel modes deflated before the direct solve.
  int kernel_modes = 0;
  std::string failure;
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  /// Least-squares slopes of l2_u, h1_u, l2_p, lam_int over the ok rows;
  /// NaN with fewer than two.
  std::array<double, 4> slopes{};
};

/// Least-squares slope of log(err) against log(h). Throws
/// std::invalid_argument with fewer than two points, mismatched lengths or
/// nonpositive values.
double fit_slope(std::span<const double> h, std::span<const double> err);

/// Integral of the exact multiplier over the exact circle, composite Gauss
/// with `panels` panels of `points` points each.
Point exact_multiplier_integral(const ExactSolution& exact, const LevelSet& ls, int panels = 512,
                                int points = 8);

/// Errors of a solved discretization. Velocity and pressure are compared on
/// the fluid domain with the error quadrature; pressures are mean-adjusted.
ErrorRow compute_errors(const Discretization& disc, const Solution& sol, const ExactSolution& exact);

struct StudyOptions {
  LevelSet level_set{};
  int subsegments = 8;
  QuadratureDegrees degrees{};
  ExecPolicy policy = ExecPolicy::OpenMP;
  /// Retry singular systems by regularized least squares; the row stays ok
  /// but is flagged singular and enters the slope fit.
  bool least_squares_fallback = true;
  bool probe_infsup = false;
  /// Called with every assembled system before solving (matrix export).
  std::function<void(int n, const BlockSystem&)> on_system;
};

/// build -> assemble -> solve -> errors per mesh. Failures (singular solve
/// without fallback, missing good neighbor) flag the row and the sweep
/// continues.
ErrorReport run_convergence_study(const MethodConfig& config, const std::vector<int>& n_list,
                                  const StudyOptions& options = {});

/// CSV: header "n,h,l2_u,h1_u,l2_p,lam_int" (plus ",infsup" when requested),
/// one row per mesh, then a "slope" row.
void write_csv(std::ostream& out, const ErrorReport& report, bool with_infsup);

/// Largest n accepted by estimate_infsup.
inline constexpr int kMaxInfSupMesh = 16;

/// min_x max_y (y^T A x) / (|x|_N |y|_N) for symmetric A and SPD N, i.e. the
/// smallest |eigenvalue| of L^{-1} A L^{-T} with N = L L^T.
double smallest_generalized_singular_value(const Eigen::MatrixXd& A, const Eigen::MatrixXd& N);

/// Discrete inf-sup constant of the variant's bilinear form in its triple
/// norm, with wall DOFs removed and the pressure restricted to zero fluid
/// mean. Throws std::invalid_argument for n > kMaxInfSupMesh.
double estimate_infsup(const MethodConfig& config, int n, const LevelSet& ls = {},
                       int subsegments = 8, QuadratureDegrees degrees = {});

}  // namespace fdstokes
