#include <doctest.h>

#include "fdstokes/assembly.hpp"
#include "fdstokes/exact.hpp"
#include "fdstokes/study.hpp"

using namespace fdstokes;

namespace {

bool same(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  const SparseMatrix d = a - b;
  for (int k = 0; k < d.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) {
      if (it.value() != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("OpenMP kernels reproduce the serial reference bit for bit") {
  set_thread_count(4);
  CHECK(max_thread_count() >= 1);
  const ExactSolution exact;
  const VectorField f = [&](const Point& x) { return exact.f(x); };
  const VectorField g = [&](const Point& x) { return exact.u(x); };
  struct Case {
    Variant v;
    FeTriple fe;
  };
  for (const Case& c : {Case{Variant::HR_TH, {2, 1, 1}}, Case{Variant::HR_BP, {1, 1, 1}},
                        Case{Variant::HR_IP, {1, 0, 1}}, Case{Variant::BH_0_IP, {1, 0, 0}},
                        Case{Variant::BH_1_TH, {2, 1, 1}}}) {
    CAPTURE(to_string(c.v));
    const auto config = MethodConfig::make(c.v, c.fe);
    const Discretization serial(20, LevelSet{}, 8, config.theta_min, c.fe, {}, ExecPolicy::Serial);
    const Discretization omp(20, LevelSet{}, 8, config.theta_min, c.fe, {}, ExecPolicy::OpenMP);
    CHECK(serial.cut().fluid_area() == omp.cut().fluid_area());
    CHECK(serial.cut().interface_length() == omp.cut().interface_length());
    CHECK(serial.cut().good_bad().bad_elements == omp.cut().good_bad().bad_elements);
    const auto bs = assemble_all(config, serial, f, g);
    const auto bo = assemble_all(config, omp, f, g);
    CHECK(same(bs.stokes.K, bo.stokes.K));
    CHECK(same(bs.stokes.B, bo.stokes.B));
    CHECK(same(bs.stokes.C, bo.stokes.C));
    CHECK((bs.stokes.F.array() == bo.stokes.F.array()).all());
    CHECK((bs.stokes.G.array() == bo.stokes.G.array()).all());
    CHECK(same(bs.interface.uu, bo.interface.uu));
    CHECK(same(bs.interface.ll, bo.interface.ll));
    CHECK(same(bs.pressure_stab, bo.pressure_stab));
    CHECK(same(bs.multiplier_stab, bo.multiplier_stab));
    const BlockSystem ss = build_system(config, serial, bs, g);
    const BlockSystem so = build_system(config, omp, bo, g);
    CHECK(same(ss.matrix, so.matrix));
    CHECK((ss.rhs.array() == so.rhs.array()).all());
  }
  set_thread_count(0);
}

TEST_CASE("parallel reductions are ordered") {
  set_thread_count(3);
  std::vector<int> elems(1000);
  for (int i = 0; i < 1000; ++i) elems[i] = i;
  auto f = [](int i) { return 1.0 / (1.0 + i * i); };
  CHECK(reduce_elements(elems, ExecPolicy::Serial, f) == reduce_elements(elems, ExecPolicy::OpenMP, f));
  const BackgroundMesh mesh(30);
  const CutGeometry cut(mesh, LevelSet{}, 8, ExecPolicy::OpenMP);
  auto fx = [](const Point& x) { return std::sin(x.x()) * x.y(); };
  CHECK(integrate_fluid(cut, fx, 4, ExecPolicy::Serial) == integrate_fluid(cut, fx, 4, ExecPolicy::OpenMP));
  set_thread_count(0);
}

TEST_CASE("sweeps agree between policies") {
  set_thread_count(4);
  const auto config = MethodConfig::make(Variant::HR_BP, {1, 1, 1});
  StudyOptions a, b;
  a.policy = ExecPolicy::Serial;
  b.policy = ExecPolicy::OpenMP;
  const auto ra = run_convergence_study(config, {8, 16}, a);
  const auto rb = run_convergence_study(config, {8, 16}, b);
  for (std::size_t i = 0; i < ra.rows.size(); ++i) {
    CHECK(ra.rows[i].l2_u == rb.rows[i].l2_u);
    CHECK(ra.rows[i].l2_p == rb.rows[i].l2_p);
    CHECK(ra.rows[i].lam_int == rb.rows[i].lam_int);
  }
  set_thread_count(0);
}
