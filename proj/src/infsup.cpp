#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "fdstokes/study.hpp"

namespace fdstokes {

double smallest_generalized_singular_value(const Eigen::MatrixXd& A, const Eigen::MatrixXd& N) {
  if (A.rows() != A.cols() || N.rows() != N.cols() || A.rows() != N.rows() || A.rows() == 0) {
    throw std::invalid_argument("inf-sup probe: A and N must be square of equal size");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, N, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("inf-sup probe: norm matrix is not positive definite");
  }
  return es.eigenvalues().cwiseAbs().minCoeff();
}

namespace {

// Gram matrix of the triple norm in the [U | P | Lambda] layout.
Eigen::MatrixXd triple_norm_gram(const MethodConfig& config, const Discretization& disc) {
  const auto& V = disc.velocity();
  const auto& Q = disc.pressure();
  const auto& L = disc.multiplier();
  const DofLayout layout = disc.layout();
  const double h = disc.h();
  const int nv = V.nodes_per_element();
  const int npl = Q.nodes_per_element();

  auto volume = [&](int t, LocalContribution& out) {
    const auto vd = V.element_dofs(t);
    const auto pd = Q.element_dofs(t);
    for (const auto& q : disc.fluid_quadrature().points(t)) {
      const ShapeEval sv = eval_at(V, t, q.x);
      const ShapeEval sp = eval_at(Q, t, q.x);
      for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < nv; ++a) {
          for (int b = 0; b < nv; ++b) {
            out.add(vd[c * nv + a], vd[c * nv + b], q.w * sv.grad[a].dot(sv.grad[b]));
          }
        }
      }
      for (int a = 0; a < npl; ++a) {
        for (int b = 0; b < npl; ++b) {
          out.add(layout.p0() + pd[a], layout.p0() + pd[b], q.w * sp.value[a] * sp.value[b]);
        }
      }
    }
  };
  auto interface = [&](int t, LocalContribution& out) {
    const auto vd = V.element_dofs(t);
    const auto ld = L.element_dofs(t);
    const int nl = L.nodes_per_element();
    for (const auto& q : disc.interface_quadrature().points(t)) {
      const ShapeEval sv = eval_at(V, t, q.x);
      const ShapeEval sl = eval_at(L, t, q.x);
      for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < nv; ++a) {
          for (int b = 0; b < nv; ++b) {
            out.add(vd[c * nv + a], vd[c * nv + b], q.w * sv.value[a] * sv.value[b] / h);
          }
        }
        for (int a = 0; a < nl; ++a) {
          for (int b = 0; b < nl; ++b) {
            out.add(layout.l0() + ld[c * nl + a], layout.l0() + ld[c * nl + b],
                    h * q.w * sl.value[a] * sl.value[b]);
          }
        }
      }
    }
  };

  const int size = layout.nu + layout.np + layout.nl;
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(size, size);
  auto scatter = [&](const std::vector<Triplet>& trip) {
    for (const auto& t : trip) N(t.row(), t.col()) += t.value();
  };
  scatter(gather_elements(disc.cut().extended().members, ExecPolicy::Serial, volume).matrix);
  scatter(gather_elements(disc.cut().cut().members, ExecPolicy::Serial, interface).matrix);

  // Mesh-dependent extras; the stabilization assemblers carry a minus sign.
  PressureStab pstab = PressureStab::None;
  if (!Q.continuous()) pstab = PressureStab::InteriorPenalty;
  else if (V.degree() == 1) pstab = PressureStab::BrezziPitkaranta;
  if (pstab != PressureStab::None) {
    N.block(layout.p0(), layout.p0(), layout.np, layout.np) -=
        Eigen::MatrixXd(assemble_pressure_stab(disc, pstab, 1.0));
  }
  switch (config.multiplier_stab()) {
    case MultiplierStab::Gradient:
      N.block(layout.l0(), layout.l0(), layout.nl, layout.nl) -=
          Eigen::MatrixXd(assemble_multiplier_stab(disc, 1, 1.0));
      break;
    case MultiplierStab::Jump:
      N.block(layout.l0(), layout.l0(), layout.nl, layout.nl) -=
          Eigen::MatrixXd(assemble_multiplier_stab(disc, 0, 1.0));
      break;
    case MultiplierStab::None:
      break;
  }
  return N;
}

}  // namespace

double estimate_infsup(const MethodConfig& config, int n, const LevelSet& ls, int subsegments,
                       QuadratureDegrees degrees) {
  if (n > kMaxInfSupMesh) {
    throw std::invalid_argument("inf-sup probe limited to n <= " + std::to_string(kMaxInfSupMesh) +
                                ", got " + std::to_string(n));
  }
  config.validate();
  const Discretization disc(n, ls, subsegments, config.theta_min, config.fe, degrees,
                            ExecPolicy::Serial);
  const VectorField zero = [](const Point&) { return Point(Point::Zero()); };
  const auto blocks = assemble_all(config, disc, zero, zero);
  const BlockSystem sys = compose_system(disc, blocks);
  const DofLayout layout = sys.layout;
  const int size = layout.nu + layout.np + layout.nl;
  const Eigen::MatrixXd A_full = Eigen::MatrixXd(sys.matrix).topLeftCorner(size, size);
  const Eigen::MatrixXd N_full = triple_norm_gram(config, disc);

  // Keep non-wall velocity, all pressure and multiplier DOFs.
  std::vector<int> keep;
  for (int i = 0; i < layout.nu; ++i) {
    if (!disc.velocity().is_wall_dof(i)) keep.push_back(i);
  }
  const int p_start = static_cast<int>(keep.size());
  for (int i = layout.p0(); i < size; ++i) keep.push_back(i);
  Eigen::MatrixXd A = A_full(keep, keep);
  Eigen::MatrixXd N = N_full(keep, keep);

  // Rotate the pressure block so its first direction is the mean
  // functional, then drop that direction: the rest spans zero-mean pressures.
  const Eigen::VectorXd m = blocks.stokes.pressure_mean;
  const Eigen::MatrixXd mcol = m;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(mcol);
  const Eigen::MatrixXd H = qr.householderQ() * Eigen::MatrixXd::Identity(layout.np, layout.np);
  auto rotate = [&](Eigen::MatrixXd& M) {
    M.middleCols(p_start, layout.np) = M.middleCols(p_start, layout.np) * H;
    M.middleRows(p_start, layout.np) = H.transpose() * M.middleRows(p_start, layout.np);
  };
  rotate(A);
  rotate(N);
  std::vector<int> reduced;
  for (int i = 0; i < static_cast<int>(keep.size()); ++i) {
    if (i != p_start) reduced.push_back(i);
  }
  const Eigen::MatrixXd Ar = A(reduced, reduced);
  const Eigen::MatrixXd Nr = N(reduced, reduced);
  return smallest_generalized_singular_value(0.5 * (Ar + Ar.transpose()), 0.5 * (Nr + Nr.transpose()));
}

}  // namespace fdstokes
