#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fdstokes/fespace.hpp"
#include "fdstokes/geometry.hpp"
#include "fdstokes/mesh.hpp"
#include "fdstokes/parallel.hpp"
#include "fdstokes/quadrature.hpp"

namespace fdstokes {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Method variants. BarbosaHughes adds the interface traction penalty
/// without reconstruction; HR_* add it with the good-neighbor extension and
/// a pressure stabilization chosen by the velocity/pressure pair; BH_l_*
/// penalize only the multiplier (l = 0 jumps, l = 1 gradient).
enum class Variant {
  NoStab,
  BarbosaHughes,
  HR_BP,
  HR_IP,
  HR_TH,
  BH_1_BP,
  BH_0_BP,
  BH_0_IP,
  BH_1_TH,
  BH_0_TH,
};

std::string_view to_string(Variant v);
/// Throws std::invalid_argument for unknown names.
Variant parse_variant(std::string_view name);
std::vector<Variant> all_variants();

/// Polynomial degrees of (velocity, pressure, multiplier).
struct FeTriple {
  int velocity = 2;
  int pressure = 1;
  int multiplier = 1;

  bool operator==(const FeTriple&) const = default;
  /// "P2-P1-P1"
  std::string label() const;
};

enum class PressureStab { None, BrezziPitkaranta, InteriorPenalty };
enum class MultiplierStab { None, Jump, Gradient };

struct MethodConfig {
  Variant variant = Variant::NoStab;
  FeTriple fe{};
  double gamma0 = 0.05;
  double theta = 0.05;
  double gamma = 0.05;
  double theta_min = 0.01;
  bool hat_u = false;
  bool hat_p = false;
  /// Factor in front of D(u)n inside the interface traction penalty.
  int viscous_factor = 2;

  /// Config with the hat flags the variant prescribes; validated.
  static MethodConfig make(Variant variant, FeTriple fe);
  /// Throws std::invalid_argument on an inadmissible FE triple, hat flags
  /// that disagree with the variant, negative parameters or a viscous
  /// factor other than 1 or 2.
  void validate() const;

  bool interface_stabilized() const;
  PressureStab pressure_stab() const;
  MultiplierStab multiplier_stab() const;
};

std::vector<FeTriple> admissible_triples(Variant v);

struct QuadratureDegrees {
  int volume = 4;
  int interface = 6;
  int error = 6;
};

/// Row/column layout of the saddle-point system: [U | P | Lambda | mean].
struct DofLayout {
  int nu = 0;
  int np = 0;
  int nl = 0;

  int u0() const { return 0; }
  int p0() const { return nu; }
  int l0() const { return nu + np; }
  int mean_row() const { return nu + np + nl; }
  int size() const { return nu + np + nl + 1; }
};

/// Mesh, cut geometry, FE spaces and quadratures for one resolution.
/// Velocity and pressure live on the extended mesh, the multiplier on the
/// cut mesh; both velocity and pressure carry the good-neighbor map.
class Discretization {
 public:
  Discretization(int n, const LevelSet& ls, int subsegments, double theta_min, FeTriple fe,
                 QuadratureDegrees degrees = {}, ExecPolicy policy = ExecPolicy::OpenMP);
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const BackgroundMesh& mesh() const { return *mesh_; }
  const CutGeometry& cut() const { return *cut_; }
  const FeSpace& velocity() const { return *velocity_; }
  const FeSpace& pressure() const { return *pressure_; }
  const FeSpace& multiplier() const { return *multiplier_; }
  const FluidQuadrature& fluid_quadrature() const { return *fluid_; }
  const InterfaceQuadrature& interface_quadrature() const { return *interface_; }
  const QuadratureDegrees& degrees() const { return degrees_; }
  const FeTriple& fe() const { return fe_; }
  DofLayout layout() const;
  double h() const { return mesh_->h(); }
  ExecPolicy policy() const { return policy_; }

 private:
  FeTriple fe_;
  QuadratureDegrees degrees_;
  ExecPolicy policy_;
  std::unique_ptr<BackgroundMesh> mesh_;
  std::unique_ptr<CutGeometry> cut_;
  std::unique_ptr<FeSpace> velocity_;
  std::unique_ptr<FeSpace> pressure_;
  std::unique_ptr<FeSpace> multiplier_;
  std::unique_ptr<FluidQuadrature> fluid_;
  std::unique_ptr<InterfaceQuadrature> interface_;
};

using VectorField = std::function<Point(const Point&)>;

/// Unstabilized blocks. K: nu x nu, B: np x nu, C: nl x nu, F: nu, G: nl;
/// pressure_mean holds the fluid integrals of the pressure basis.
struct StokesBlocks {
  SparseMatrix K;
  SparseMatrix B;
  SparseMatrix C;
  Eigen::VectorXd F;
  Eigen::VectorXd G;
  Eigen::VectorXd pressure_mean;
};

/// Interface traction penalty blocks, stored in the lower block triangle:
/// uu (nu x nu), up (np x nu), ul (nl x nu), pp (np x np), pl (nl x np),
/// ll (nl x nl). All empty when gamma0 == 0.
struct InterfaceStabBlocks {
  SparseMatrix uu;
  SparseMatrix up;
  SparseMatrix ul;
  SparseMatrix pp;
  SparseMatrix pl;
  SparseMatrix ll;
};

StokesBlocks assemble_stokes_blocks(const Discretization& disc, const VectorField& force,
                                    const VectorField& interface_data);

InterfaceStabBlocks assemble_barbosa_hughes(const Discretization& disc, double gamma0, bool hat_u,
                                            bool hat_p, int viscous_factor);

/// np x np pressure stabilization; empty when theta == 0 or kind == None.
/// Throws std::invalid_argument for interior penalty on a continuous pressure.
SparseMatrix assemble_pressure_stab(const Discretization& disc, PressureStab kind, double theta);

/// nl x nl multiplier stabilization with l = 0 (jumps) or l = 1 (gradient).
/// Throws std::invalid_argument when l does not match the multiplier degree.
SparseMatrix assemble_multiplier_stab(const Discretization& disc, int l, double gamma);

/// Assembled saddle-point system with wall DOFs eliminated and the mean
/// pressure row appended.
struct BlockSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  DofLayout layout;
  std::vector<int> wall_dofs;
  Eigen::VectorXd wall_values;  // indexed like wall_dofs
};

struct AssembledBlocks {
  StokesBlocks stokes;
  InterfaceStabBlocks interface;
  SparseMatrix pressure_stab;
  SparseMatrix multiplier_stab;
};

/// Every block the config asks for.
AssembledBlocks assemble_all(const MethodConfig& config, const Discretization& disc,
                             const VectorField& force, const VectorField& interface_data);

/// Unconstrained symmetric matrix and right-hand side in the full layout
/// (mean row included), before wall elimination.
BlockSystem compose_system(const Discretization& disc, const AssembledBlocks& blocks);

/// compose_system followed by strong elimination of the wall DOFs with
/// values wall_velocity(node point).
BlockSystem build_system(const MethodConfig& config, const Discretization& disc,
                         const AssembledBlocks& blocks, const VectorField& wall_velocity);

}  // namespace fdstokes
