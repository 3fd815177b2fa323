#include "fdstokes/assembly.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace fdstokes {

namespace {

constexpr std::array<std::string_view, 10> kVariantNames{
    "NoStab", "BarbosaHughes", "HR_BP", "HR_IP", "HR_TH",
    "BH_1_BP", "BH_0_BP", "BH_0_IP", "BH_1_TH", "BH_0_TH"};

enum Region { RegionU = 0, RegionP = 1, RegionL = 2 };

// Splits a global [U | P | Lambda] index into (region, local index).
std::pair<int, int> split_index(const DofLayout& layout, int g) {
  if (g < layout.p0()) return {RegionU, g};
  if (g < layout.l0()) return {RegionP, g - layout.p0()};
  return {RegionL, g - layout.l0()};
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

// Dispatches global triplets into the lower block triangle; entries above
// the block diagonal are dropped (the kernels emit both halves).
std::array<std::array<std::vector<Triplet>, 3>, 3> split_blocks(const DofLayout& layout,
                                                                const std::vector<Triplet>& all) {
  std::array<std::array<std::vector<Triplet>, 3>, 3> out;
  for (const auto& t : all) {
    const auto [ri, i] = split_index(layout, t.row());
    const auto [rj, j] = split_index(layout, t.col());
    if (ri < rj) continue;
    out[ri][rj].emplace_back(i, j, t.value());
  }
  return out;
}

// Symmetric gradient of the vector basis function e_c N: D n for normal n.
Point sym_grad_times_normal(int c, const Point& grad, const Point& n) {
  Point e = Point::Zero();
  e[c] = 1.0;
  return 0.5 * (e * grad.dot(n) + grad * n[c]);
}

}  // namespace

std::string_view to_string(Variant v) { return kVariantNames[static_cast<std::size_t>(v)]; }

Variant parse_variant(std::string_view name) {
  for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
    if (kVariantNames[i] == name) return static_cast<Variant>(i);
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

std::vector<Variant> all_variants() {
  std::vector<Variant> out;
  for (std::size_t i = 0; i < kVariantNames.size(); ++i) out.push_back(static_cast<Variant>(i));
  return out;
}

std::string FeTriple::label() const {
  return "P" + std::to_string(velocity) + "-P" + std::to_string(pressure) + "-P" +
         std::to_string(multiplier);
}

std::vector<FeTriple> admissible_triples(Variant v) {
  switch (v) {
    case Variant::NoStab:
    case Variant::BarbosaHughes:
      return {{2, 1, 0}, {2, 1, 1}, {1, 1, 1}};
    case Variant::HR_BP:
      return {{1, 1, 0}, {1, 1, 1}};
    case Variant::HR_IP:
      return {{1, 0, 0}, {1, 0, 1}};
    case Variant::HR_TH:
      return {{2, 1, 0}, {2, 1, 1}};
    case Variant::BH_1_BP:
      return {{1, 1, 1}};
    case Variant::BH_0_BP:
      return {{1, 1, 0}};
    case Variant::BH_0_IP:
      return {{1, 0, 0}};
    case Variant::BH_1_TH:
      return {{2, 1, 1}};
    case Variant::BH_0_TH:
      return {{2, 1, 0}};
  }
  return {};
}

MethodConfig MethodConfig::make(Variant variant, FeTriple fe) {
  MethodConfig c;
  c.variant = variant;
  c.fe = fe;
  c.hat_u = variant == Variant::HR_BP || variant == Variant::HR_IP || variant == Variant::HR_TH;
  c.hat_p = variant == Variant::HR_TH;
  c.validate();
  return c;
}

void MethodConfig::validate() const {
  const auto triples = admissible_triples(variant);
  if (std::find(triples.begin(), triples.end(), fe) == triples.end()) {
    throw std::invalid_argument("FE triple " + fe.label() + " is not admissible for variant " +
                                std::string(to_string(variant)));
  }
  const bool want_u = variant == Variant::HR_BP || variant == Variant::HR_IP ||
                      variant == Variant::HR_TH;
  const bool want_p = variant == Variant::HR_TH;
  if (hat_u != want_u || hat_p != want_p) {
    throw std::invalid_argument("hat flags do not match variant " + std::string(to_string(variant)));
  }
  if (!(gamma0 >= 0.0) || !(theta >= 0.0) || !(gamma >= 0.0)) {
    throw std::invalid_argument("stabilization parameters must be nonnegative");
  }
  if (!(theta_min >= 0.0 && theta_min <= 1.0)) {
    throw std::invalid_argument("theta_min must lie in [0, 1]");
  }
  if (viscous_factor != 1 && viscous_factor != 2) {
    throw std::invalid_argument("viscous_factor must be 1 or 2");
  }
}

bool MethodConfig::interface_stabilized() const {
  return variant == Variant::BarbosaHughes || variant == Variant::HR_BP ||
         variant == Variant::HR_IP || variant == Variant::HR_TH;
}

PressureStab MethodConfig::pressure_stab() const {
  switch (variant) {
    case Variant::HR_BP:
    case Variant::BH_1_BP:
    case Variant::BH_0_BP:
      return PressureStab::BrezziPitkaranta;
    case Variant::HR_IP:
    case Variant::BH_0_IP:
      return PressureStab::InteriorPenalty;
    default:
      return PressureStab::None;
  }
}

MultiplierStab MethodConfig::multiplier_stab() const {
  switch (variant) {
    case Variant::BH_1_BP:
    case Variant::BH_1_TH:
      return MultiplierStab::Gradient;
    case Variant::BH_0_BP:
    case Variant::BH_0_IP:
    case Variant::BH_0_TH:
      return MultiplierStab::Jump;
    default:
      return MultiplierStab::None;
  }
}

Discretization::Discretization(int n, const LevelSet& ls, int subsegments, double theta_min,
                               FeTriple fe, QuadratureDegrees degrees, ExecPolicy policy)
    : fe_(fe), degrees_(degrees), policy_(policy) {
  mesh_ = std::make_unique<BackgroundMesh>(n);
  cut_ = std::make_unique<CutGeometry>(*mesh_, ls, subsegments, policy);
  cut_->set_good_bad(classify_good_bad(*cut_, theta_min));
  std::vector<int> recon(mesh_->num_triangles());
  for (int t = 0; t < mesh_->num_triangles(); ++t) recon[t] = cut_->reconstruction_target(t);
  velocity_ = std::make_unique<FeSpace>(*mesh_, cut_->extended(), fe.velocity, 2, recon);
  pressure_ = std::make_unique<FeSpace>(*mesh_, cut_->extended(), fe.pressure, 1, recon);
  multiplier_ = std::make_unique<FeSpace>(*mesh_, cut_->cut(), fe.multiplier, 2);
  fluid_ = std::make_unique<FluidQuadrature>(*cut_, degrees.volume);
  interface_ = std::make_unique<InterfaceQuadrature>(*cut_, degrees.interface);
}

DofLayout Discretization::layout() const {
  return {velocity_->num_dofs(), pressure_->num_dofs(), multiplier_->num_dofs()};
}

StokesBlocks assemble_stokes_blocks(const Discretization& disc, const VectorField& force,
                                    const VectorField& interface_data) {
  const auto& V = disc.velocity();
  const auto& Q = disc.pressure();
  const auto& L = disc.multiplier();
  const DofLayout layout = disc.layout();

  auto kernel = [&](int t, LocalContribution& out) {
    const auto vd = V.element_dofs(t);
    const auto pd = Q.element_dofs(t);
    const int nv = V.nodes_per_element();
    const int npl = Q.nodes_per_element();
    for (const auto& q : disc.fluid_quadrature().points(t)) {
      const ShapeEval su = eval_at(V, t, q.x);
      const ShapeEval sp = eval_at(Q, t, q.x);
      const Point f = force(q.x);
      for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < nv; ++a) {
          const int i = vd[c * nv + a];
          out.add(layout.u0() + i, q.w * f[c] * su.value[a]);
          for (int d = 0; d < 2; ++d) {
            for (int b = 0; b < nv; ++b) {
              // 2 D(e_c Na) : D(e_d Nb) = delta_cd grad Na . grad Nb + d_d Na d_c Nb
              double v = su.grad[a][d] * su.grad[b][c];
              if (c == d) v += su.grad[a].dot(su.grad[b]);
              out.add(layout.u0() + i, layout.u0() + vd[d * nv + b], q.w * v);
            }
          }
          for (int k = 0; k < npl; ++k) {
            out.add(layout.p0() + pd[k], layout.u0() + i, -q.w * sp.value[k] * su.grad[a][c]);
          }
        }
      }
      for (int k = 0; k < npl; ++k) out.add(layout.p0() + pd[k], q.w * sp.value[k]);
    }
    if (!L.contains(t)) return;
    const auto ld = L.element_dofs(t);
    const int nl = L.nodes_per_element();
    for (const auto& q : disc.interface_quadrature().points(t)) {
      const ShapeEval su = eval_at(V, t, q.x);
      const ShapeEval sl = eval_at(L, t, q.x);
      const Point g = interface_data(q.x);
      for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < nl; ++a) {
          const int i = layout.l0() + ld[c * nl + a];
          out.add(i, q.w * g[c] * sl.value[a]);
          for (int b = 0; b < nv; ++b) {
            out.add(i, layout.u0() + vd[c * nv + b], q.w * sl.value[a] * su.value[b]);
          }
        }
      }
    }
  };

  const auto gathered = gather_elements(disc.cut().extended().members, disc.policy(), kernel);
  auto blocks = split_blocks(layout, gathered.matrix);
  StokesBlocks out;
  out.K = from_triplets(layout.nu, layout.nu, blocks[RegionU][RegionU]);
  out.B = from_triplets(layout.np, layout.nu, blocks[RegionP][RegionU]);
  out.C = from_triplets(layout.nl, layout.nu, blocks[RegionL][RegionU]);
  out.F = Eigen::VectorXd::Zero(layout.nu);
  out.G = Eigen::VectorXd::Zero(layout.nl);
  out.pressure_mean = Eigen::VectorXd::Zero(layout.np);
  for (const auto& [g, v] : gathered.vector) {
    const auto [r, i] = split_index(layout, g);
    if (r == RegionU) out.F[i] += v;
    else if (r == RegionP) out.pressure_mean[i] += v;
    else out.G[i] += v;
  }
  return out;
}

InterfaceStabBlocks assemble_barbosa_hughes(const Discretization& disc, double gamma0, bool hat_u,
                                            bool hat_p, int viscous_factor) {
  const DofLayout layout = disc.layout();
  InterfaceStabBlocks out;
  out.uu.resize(layout.nu, layout.nu);
  out.up.resize(layout.np, layout.nu);
  out.ul.resize(layout.nl, layout.nu);
  out.pp.resize(layout.np, layout.np);
  out.pl.resize(layout.nl, layout.np);
  out.ll.resize(layout.nl, layout.nl);
  if (gamma0 == 0.0) return out;

  const auto& V = disc.velocity();
  const auto& Q = disc.pressure();
  const auto& L = disc.multiplier();
  const double scale = -gamma0 * disc.h();

  auto kernel = [&](int t, LocalContribution& out_local) {
    const int tu = hat_u ? V.reconstruction_target(t) : t;
    const int tp = hat_p ? Q.reconstruction_target(t) : t;
    const auto vd = V.element_dofs(tu);
    const auto pd = Q.element_dofs(tp);
    const auto ld = L.element_dofs(t);
    const int nv = V.nodes_per_element();
    const int npl = Q.nodes_per_element();
    const int nl = L.nodes_per_element();

    std::vector<int> index;
    index.reserve(vd.size() + pd.size() + ld.size());
    for (int d : vd) index.push_back(layout.u0() + d);
    for (int d : pd) index.push_back(layout.p0() + d);
    for (int d : ld) index.push_back(layout.l0() + d);
    std::vector<Point> vec(index.size());
    const std::size_t count = index.size();
    std::vector<double> local(count * count, 0.0);

    for (const auto& q : disc.interface_quadrature().points(t)) {
      const ShapeEval su = eval_at(V, tu, q.x);
      const ShapeEval sp = eval_at(Q, tp, q.x);
      const ShapeEval sl = eval_at(L, t, q.x);
      std::size_t k = 0;
      for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < nv; ++a) {
          vec[k++] = viscous_factor * sym_grad_times_normal(c, su.grad[a], q.normal);
        }
      }
      for (int a = 0; a < npl; ++a) vec[k++] = -sp.value[a] * q.normal;
      for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < nl; ++a) {
          Point e = Point::Zero();
          e[c] = sl.value[a];
          vec[k++] = e;
        }
      }
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) local[i * count + j] += q.w * vec[i].dot(vec[j]);
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        out_local.add(index[i], index[j], scale * local[i * count + j]);
      }
    }
  };

  const auto gathered = gather_elements(disc.cut().cut().members, disc.policy(), kernel);
  auto blocks = split_blocks(layout, gathered.matrix);
  out.uu = from_triplets(layout.nu, layout.nu, blocks[RegionU][RegionU]);
  out.up = from_triplets(layout.np, layout.nu, blocks[RegionP][RegionU]);
  out.ul = from_triplets(layout.nl, layout.nu, blocks[RegionL][RegionU]);
  out.pp = from_triplets(layout.np, layout.np, blocks[RegionP][RegionP]);
  out.pl = from_triplets(layout.nl, layout.np, blocks[RegionL][RegionP]);
  out.ll = from_triplets(layout.nl, layout.nl, blocks[RegionL][RegionL]);
  return out;
}

namespace {

// Jump penalty of a P0 field over full interior edges of its submesh.
SparseMatrix assemble_p0_jumps(const Discretization& disc, const FeSpace& space, double scale) {
  const auto& mesh = disc.mesh();
  const auto& edges = space.submesh().interior_edges;
  auto kernel = [&](int e, LocalContribution& out) {
    const auto& edge = mesh.edge(e);
    const double w = scale * mesh.edge_length(e);
    const auto n0 = space.element_nodes(edge.triangles[0]);
    const auto n1 = space.element_nodes(edge.triangles[1]);
    for (int c = 0; c < space.components(); ++c) {
      const int a = space.dof(n0[0], c);
      const int b = space.dof(n1[0], c);
      out.add(a, a, w);
      out.add(a, b, -w);
      out.add(b, a, -w);
      out.add(b, b, w);
    }
  };
  const auto gathered = gather_elements(edges, disc.policy(), kernel);
  return from_triplets(space.num_dofs(), space.num_dofs(), gathered.matrix);
}

// Gradient penalty over full (unclipped) triangles of the space's submesh,
// componentwise for vector spaces.
SparseMatrix assemble_full_gradient(const Discretization& disc, const FeSpace& space,
                                    double scale) {
  const auto& mesh = disc.mesh();
  const auto rule = triangle_rule(std::max(1, 2 * (space.degree() - 1)));
  const int nloc = space.nodes_per_element();
  auto kernel = [&](int t, LocalContribution& out) {
    const auto dofs = space.element_dofs(t);
    for (const auto& q : full_triangle_points(mesh, t, rule)) {
      const ShapeEval s = eval_at(space, t, q.x);
      for (int c = 0; c < space.components(); ++c) {
        for (int a = 0; a < nloc; ++a) {
          for (int b = 0; b < nloc; ++b) {
            out.add(dofs[c * nloc + a], dofs[c * nloc + b], scale * q.w * s.grad[a].dot(s.grad[b]));
          }
        }
      }
    }
  };
  const auto gathered = gather_elements(space.submesh().members, disc.policy(), kernel);
  return from_triplets(space.num_dofs(), space.num_dofs(), gathered.matrix);
}

}  // namespace

SparseMatrix assemble_pressure_stab(const Discretization& disc, PressureStab kind, double theta) {
  const auto& Q = disc.pressure();
  const double h = disc.h();
  if (kind == PressureStab::InteriorPenalty && Q.continuous()) {
    throw std::invalid_argument("interior penalty needs a discontinuous (P0) pressure");
  }
  if (kind == PressureStab::BrezziPitkaranta && !Q.continuous()) {
    throw std::invalid_argument("Brezzi-Pitkaranta stabilization needs a continuous pressure");
  }
  if (kind == PressureStab::None || theta == 0.0) {
    return SparseMatrix(Q.num_dofs(), Q.num_dofs());
  }
  if (kind == PressureStab::BrezziPitkaranta) return assemble_full_gradient(disc, Q, -theta * h * h);
  return assemble_p0_jumps(disc, Q, -theta * h);
}

SparseMatrix assemble_multiplier_stab(const Discretization& disc, int l, double gamma) {
  const auto& L = disc.multiplier();
  if (l != 0 && l != 1) throw std::invalid_argument("multiplier stabilization order must be 0 or 1");
  if (l != L.degree()) {
    throw std::invalid_argument("multiplier stabilization order " + std::to_string(l) +
                                " does not match multiplier degree " + std::to_string(L.degree()));
  }
  if (gamma == 0.0) return SparseMatrix(L.num_dofs(), L.num_dofs());
  const double h = disc.h();
  if (l == 0) return assemble_p0_jumps(disc, L, -gamma * h);
  return assemble_full_gradient(disc, L, -gamma * h * h);
}

AssembledBlocks assemble_all(const MethodConfig& config, const Discretization& disc,
                             const VectorField& force, const VectorField& interface_data) {
  config.validate();
  if (!(config.fe == disc.fe())) {
    throw std::invalid_argument("config FE triple " + config.fe.label() +
                                " does not match the discretization " + disc.fe().label());
  }
  AssembledBlocks out;
  out.stokes = assemble_stokes_blocks(disc, force, interface_data);
  const double gamma0 = config.interface_stabilized() ? config.gamma0 : 0.0;
  out.interface =
      assemble_barbosa_hughes(disc, gamma0, config.hat_u, config.hat_p, config.viscous_factor);
  out.pressure_stab = assemble_pressure_stab(disc, config.pressure_stab(), config.theta);
  switch (config.multiplier_stab()) {
    case MultiplierStab::None:
      out.multiplier_stab = SparseMatrix(disc.layout().nl, disc.layout().nl);
      break;
    case MultiplierStab::Jump:
      out.multiplier_stab = assemble_multiplier_stab(disc, 0, config.gamma);
      break;
    case MultiplierStab::Gradient:
      out.multiplier_stab = assemble_multiplier_stab(disc, 1, config.gamma);
      break;
  }
  return out;
}

namespace {

void append_block(std::vector<Triplet>& out, const SparseMatrix& m, int r0, int c0, bool mirror) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      out.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
      if (mirror) out.emplace_back(c0 + it.col(), r0 + it.row(), it.value());
    }
  }
}

}  // namespace

BlockSystem compose_system(const Discretization& disc, const AssembledBlocks& blocks) {
  const DofLayout layout = disc.layout();
  const auto& s = blocks.stokes;
  const auto& b = blocks.interface;
  auto check = [](const SparseMatrix& m, int rows, int cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
      throw std::invalid_argument(std::string("block ") + name + " has wrong dimensions");
    }
  };
  check(s.K, layout.nu, layout.nu, "K");
  check(s.B, layout.np, layout.nu, "B");
  check(s.C, layout.nl, layout.nu, "C");
  check(b.uu, layout.nu, layout.nu, "S_uu");
  check(b.up, layout.np, layout.nu, "S_up");
  check(b.ul, layout.nl, layout.nu, "S_ul");
  check(b.pp, layout.np, layout.np, "S_pp");
  check(b.pl, layout.nl, layout.np, "S_pl");
  check(b.ll, layout.nl, layout.nl, "S_ll");
  check(blocks.pressure_stab, layout.np, layout.np, "S_p");
  check(blocks.multiplier_stab, layout.nl, layout.nl, "S_lambda");
  if (s.F.size() != layout.nu || s.G.size() != layout.nl || s.pressure_mean.size() != layout.np) {
    throw std::invalid_argument("right-hand side blocks have wrong dimensions");
  }

  std::vector<Triplet> trip;
  append_block(trip, s.K, layout.u0(), layout.u0(), false);
  append_block(trip, b.uu, layout.u0(), layout.u0(), false);
  append_block(trip, s.B, layout.p0(), layout.u0(), true);
  append_block(trip, b.up, layout.p0(), layout.u0(), true);
  append_block(trip, s.C, layout.l0(), layout.u0(), true);
  append_block(trip, b.ul, layout.l0(), layout.u0(), true);
  append_block(trip, b.pp, layout.p0(), layout.p0(), false);
  append_block(trip, blocks.pressure_stab, layout.p0(), layout.p0(), false);
  append_block(trip, b.pl, layout.l0(), layout.p0(), true);
  append_block(trip, b.ll, layout.l0(), layout.l0(), false);
  append_block(trip, blocks.multiplier_stab, layout.l0(), layout.l0(), false);
  for (int i = 0; i < layout.np; ++i) {
    const double m = s.pressure_mean[i];
    if (m == 0.0) continue;
    trip.emplace_back(layout.mean_row(), layout.p0() + i, m);
    trip.emplace_back(layout.p0() + i, layout.mean_row(), m);
  }

  BlockSystem sys;
  sys.layout = layout;
  sys.matrix = from_triplets(layout.size(), layout.size(), trip);
  sys.rhs = Eigen::VectorXd::Zero(layout.size());
  sys.rhs.segment(layout.u0(), layout.nu) = s.F;
  sys.rhs.segment(layout.l0(), layout.nl) = s.G;
  return sys;
}

BlockSystem build_system(const MethodConfig& config, const Discretization& disc,
                         const AssembledBlocks& blocks, const VectorField& wall_velocity) {
  config.validate();
  BlockSystem sys = compose_system(disc, blocks);
  const auto& V = disc.velocity();
  const int size = sys.layout.size();

  sys.wall_dofs = V.wall_dofs();
  sys.wall_values.resize(static_cast<Eigen::Index>(sys.wall_dofs.size()));
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(size);
  std::vector<char> is_wall(size, 0);
  for (std::size_t k = 0; k < sys.wall_dofs.size(); ++k) {
    const int d = sys.wall_dofs[k];
    const int node = d / V.components();
    const int comp = d % V.components();
    const double g = wall_velocity(V.node_point(node))[comp];
    sys.wall_values[static_cast<Eigen::Index>(k)] = g;
    lift[d] = g;
    is_wall[d] = 1;
  }
  sys.rhs -= sys.matrix * lift;

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(sys.matrix.nonZeros()));
  for (int k = 0; k < sys.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(sys.matrix, k); it; ++it) {
      if (is_wall[it.row()] || is_wall[it.col()]) continue;
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (std::size_t k = 0; k < sys.wall_dofs.size(); ++k) {
    const int d = sys.wall_dofs[k];
    trip.emplace_back(d, d, 1.0);
    sys.rhs[d] = sys.wall_values[static_cast<Eigen::Index>(k)];
  }
  sys.matrix = from_triplets(size, size, trip);
  return sys;
}

}  // namespace fdstokes
