#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fdstokes/assembly.hpp"

namespace fdstokes {

/// Raised when factorization fails or the residual check is not met.
class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

struct Solution {
  Eigen::VectorXd U;
  Eigen::VectorXd P;
  Eigen::VectorXd L;
  double mean_multiplier = 0.0;
  double relative_residual = 0.0;
  /// Set when the direct solve failed and a least-squares solution was
  /// computed instead; diagnostic holds the direct solver's message.
  bool singular = false;
  /// Dimension of the structural kernel removed before the direct solve
  /// (see isolated_unknowns); the system matrix is singular when > 0.
  int kernel_modes = 0;
  std::string diagnostic;
};

/// Sparse LU with a relative residual check ||Ax - b|| / ||b|| <= tol.
/// Throws SolveError with the factorization message (zero pivot column)
/// or the residual otherwise.
Eigen::VectorXd solve_sparse(const SparseMatrix& A, const Eigen::VectorXd& b, double tol = 1e-8,
                             double* relative_residual = nullptr);

/// Tikhonov-regularized least squares, min |Ax - b|^2 + eps |x|^2 with
/// eps = machine epsilon * max|A_ij|^2, for singular systems. Directions
/// with singular values below sqrt(eps) are suppressed.
Eigen::VectorXd solve_least_squares(const SparseMatrix& A, const Eigen::VectorXd& b,
                                    double* relative_residual = nullptr);

/// Unknowns whose column is zero except in constraint_row. With m_i the
/// constraint coefficients, every v supported on them with m . v = 0 is a
/// kernel vector; two or more make the matrix singular. Arises for pressure
/// nodes whose only triangle has all velocity DOFs on the wall.
std::vector<int> isolated_unknowns(const SparseMatrix& A, int constraint_row);

/// Solves the block system and splits the result by field. A kernel from
/// isolated unknowns is deflated first: the solution is the one orthogonal
/// to it, and the system must be consistent (residual <= 1e-8). With
/// least_squares_fallback a failed direct solve is retried by
/// solve_least_squares and the solution is flagged singular; otherwise the
/// SolveError propagates.
Solution solve(const BlockSystem& system, bool least_squares_fallback = false);

/// Matrix Market coordinate, real general, 1-based indices.
void write_matrix_market(std::ostream& out, const SparseMatrix& A);

}  // namespace fdstokes
