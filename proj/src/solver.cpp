#include "fdstokes/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace fdstokes {

namespace {

double relative_residual_of(const SparseMatrix& A, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& b) {
  const double bn = b.norm();
  return (A * x - b).norm() / (bn > 0.0 ? bn : 1.0);
}

void check_dimensions(const SparseMatrix& A, const Eigen::VectorXd& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw std::invalid_argument("solve: dimension mismatch");
  }
}

}  // namespace

std::vector<int> isolated_unknowns(const SparseMatrix& A, int constraint_row) {
  std::vector<int> out;
  for (int k = 0; k < A.outerSize(); ++k) {
    if (k == constraint_row) continue;
    bool coupled = false;
    bool constrained = false;
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      if (it.value() == 0.0) continue;
      if (it.row() == constraint_row) {
        constrained = true;
      } else {
        coupled = true;
        break;
      }
    }
    if (constrained && !coupled) out.push_back(k);
  }
  return out;
}

Eigen::VectorXd solve_sparse(const SparseMatrix& A, const Eigen::VectorXd& b, double tol,
                             double* relative_residual) {
  check_dimensions(A, b);
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    throw SolveError("sparse LU factorization failed: " + lu.lastErrorMessage());
  }
  const Eigen::VectorXd x = lu.solve(b);
  const double res = relative_residual_of(A, x, b);
  if (relative_residual) *relative_residual = res;
  if (!std::isfinite(res) || res > tol) {
    std::ostringstream msg;
    msg << "relative residual " << std::setprecision(3) << res << " exceeds " << tol
        << " (matrix numerically singular)";
    throw SolveError(msg.str());
  }
  return x;
}

Eigen::VectorXd solve_least_squares(const SparseMatrix& A, const Eigen::VectorXd& b,
                                    double* relative_residual) {
  check_dimensions(A, b);
  const auto n = static_cast<int>(A.rows());
  double amax = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
  }
  const double eps = std::numeric_limits<double>::epsilon() * amax * amax;
  // [I A; A^T -eps I] [r; x] = [b; 0] is the optimality system of
  // min |Ax - b|^2 + eps |x|^2 and is nonsingular for eps > 0.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * static_cast<std::size_t>(A.nonZeros()) + 2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 1.0);
    trip.emplace_back(n + i, n + i, -eps);
  }
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      trip.emplace_back(static_cast<int>(it.row()), n + static_cast<int>(it.col()), it.value());
      trip.emplace_back(n + static_cast<int>(it.col()), static_cast<int>(it.row()), it.value());
    }
  }
  SparseMatrix M(2 * n, 2 * n);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) {
    throw SolveError("regularized least-squares factorization failed: " + lu.lastErrorMessage());
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);
  rhs.head(n) = b;
  const Eigen::VectorXd x = lu.solve(rhs).tail(n);
  if (relative_residual) *relative_residual = relative_residual_of(A, x, b);
  return x;
}

Solution solve(const BlockSystem& system, bool least_squares_fallback) {
  Solution s;
  Eigen::VectorXd x;
  const auto& l = system.layout;
  const std::vector<int> iso = isolated_unknowns(system.matrix, l.mean_row());
  try {
    if (iso.size() < 2) {
      x = solve_sparse(system.matrix, system.rhs, 1e-8, &s.relative_residual);
    } else {
      // A v = (m . v) e_mean for v supported on iso, so {v : m . v = 0} is
      // in the kernel. Replace the rows of iso[1..] (multiples of the
      // constraint row, hence redundant) by m_0 x_i - m_i x_0 = 0, i.e. x
      // orthogonal to that kernel, and check the residual on the original.
      const SparseMatrix& A = system.matrix;
      const int mr = l.mean_row();
      std::vector<char> replaced(static_cast<std::size_t>(A.rows()), 0);
      for (std::size_t i = 1; i < iso.size(); ++i) replaced[iso[i]] = 1;
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(static_cast<std::size_t>(A.nonZeros()) + 2 * iso.size());
      for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
          if (!replaced[it.row()]) trip.emplace_back(static_cast<int>(it.row()), k, it.value());
        }
      }
      Eigen::VectorXd rhs = system.rhs;
      const double m0 = A.coeff(mr, iso[0]);
      for (std::size_t i = 1; i < iso.size(); ++i) {
        trip.emplace_back(iso[i], iso[i], m0);
        trip.emplace_back(iso[i], iso[0], -A.coeff(mr, iso[i]));
        rhs[iso[i]] = 0.0;
      }
      SparseMatrix M(A.rows(), A.cols());
      M.setFromTriplets(trip.begin(), trip.end());
      x = solve_sparse(M, rhs, 1e-8);
      s.relative_residual = relative_residual_of(A, x, system.rhs);
      if (!(s.relative_residual <= 1e-8)) {
        std::ostringstream msg;
        msg << "relative residual " << std::setprecision(3) << s.relative_residual
            << " exceeds 1e-08 after deflating " << iso.size() - 1 << " kernel modes (inconsistent system)";
        throw SolveError(msg.str());
      }
      s.kernel_modes = static_cast<int>(iso.size()) - 1;
    }
  } catch (const SolveError& e) {
    if (!least_squares_fallback) throw;
    s.singular = true;
    s.diagnostic = e.what();
    s.kernel_modes = 0;
    x = solve_least_squares(system.matrix, system.rhs, &s.relative_residual);
  }
  s.U = x.segment(l.u0(), l.nu);
  s.P = x.segment(l.p0(), l.np);
  s.L = x.segment(l.l0(), l.nl);
  s.mean_multiplier = x[l.mean_row()];
  return s;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace fdstokes
