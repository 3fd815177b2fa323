#include <doctest.h>

#include <random>

#include "fdstokes/fespace.hpp"
#include "fdstokes/geometry.hpp"

using namespace fdstokes;

namespace {

Submesh full(const BackgroundMesh& m) {
  std::vector<int> all(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) all[t] = t;
  return extract_submesh(m, all);
}

Point random_in_triangle(const TrianglePoints& p, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(rng), b = u(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return p[0] + a * (p[1] - p[0]) + b * (p[2] - p[0]);
}

}  // namespace

TEST_CASE("dof counts on the full mesh") {
  const BackgroundMesh m(10);
  const Submesh s = full(m);
  CHECK(build_space(m, s, 2, 1).num_dofs() == 441);
  CHECK(build_space(m, s, 1, 2).num_dofs() == 242);
  CHECK(build_space(m, s, 1, 1).num_dofs() == 121);
  CHECK(build_space(m, s, 0, 1).num_dofs() == 200);
  const Submesh one = extract_submesh(m, {17});
  CHECK(build_space(m, one, 0, 1).num_dofs() == 1);
  CHECK(build_space(m, one, 2, 2).num_dofs() == 12);
}

TEST_CASE("invalid spaces") {
  const BackgroundMesh m(2);
  const Submesh s = full(m);
  CHECK_THROWS_AS(build_space(m, s, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_space(m, s, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_space(m, extract_submesh(m, {}), 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(FeSpace(m, s, 0, 1, {}, Continuity::Continuous), std::invalid_argument);
}

TEST_CASE("lagrange property and partition of unity") {
  const BackgroundMesh m(3);
  const Submesh s = full(m);
  std::mt19937 rng(3);
  for (int deg : {1, 2}) {
    const FeSpace V = build_space(m, s, deg, 1);
    for (int t = 0; t < m.num_triangles(); ++t) {
      const auto nodes = V.element_nodes(t);
      for (int a = 0; a < V.nodes_per_element(); ++a) {
        const ShapeEval e = eval_at(V, t, V.node_point(nodes[a]));
        for (int b = 0; b < V.nodes_per_element(); ++b) {
          CHECK(std::abs(e.value[b] - (a == b ? 1.0 : 0.0)) < 1e-12);
        }
      }
      const ShapeEval e = eval_at(V, t, random_in_triangle(m.triangle_points(t), rng));
      double sum = 0.0;
      Point gsum = Point::Zero();
      for (int a = 0; a < e.count; ++a) {
        sum += e.value[a];
        gsum += e.grad[a];
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
      CHECK(gsum.norm() < 1e-12);
    }
  }
}

TEST_CASE("reference evaluation") {
  const BackgroundMesh m(2);
  const FeSpace V = build_space(m, full(m), 1, 1);
  const ShapeEval e = eval_basis(V, 0, Point(0.0, 0.0));
  CHECK(e.value[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_basis(V, 0, Point(0.8, 0.8)), std::invalid_argument);
  CHECK_THROWS_AS(eval_basis(V, 0, Point(-0.1, 0.2)), std::invalid_argument);
}

TEST_CASE("P2 reproduces quadratics") {
  const BackgroundMesh m(4);
  const FeSpace V = build_space(m, full(m), 2, 2);
  auto q = [](const Point& x, int c) {
    return c == 0 ? 1.0 + 2 * x.x() - x.y() + 3 * x.x() * x.y() - x.y() * x.y()
                  : -0.5 + x.x() * x.x() + 0.25 * x.y();
  };
  const Eigen::VectorXd coeffs = interpolate(V, q);
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, m.num_triangles() - 1);
  for (int k = 0; k < 10; ++k) {
    const int t = pick(rng);
    const Point x = random_in_triangle(m.triangle_points(t), rng);
    for (int c = 0; c < 2; ++c) {
      CHECK(std::abs(evaluate(V, coeffs, t, x, c) - q(x, c)) <= 1e-11);
    }
    const Point g = evaluate_gradient(V, coeffs, t, x, 0);
    CHECK(std::abs(g.x() - (2 + 3 * x.y())) < 1e-10);
    CHECK(std::abs(g.y() - (-1 + 3 * x.x() - 2 * x.y())) < 1e-10);
  }
}

TEST_CASE("continuity across elements") {
  const BackgroundMesh m(3);
  const FeSpace V = build_space(m, full(m), 2, 1);
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(V.num_dofs(), -1.0, 2.0).array().sin();
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& edge = m.edge(e);
    if (edge.on_boundary()) continue;
    const Point x = 0.3 * m.vertex(edge.vertices[0]) + 0.7 * m.vertex(edge.vertices[1]);
    CHECK(evaluate(V, c, edge.triangles[0], x, 0) ==
          doctest::Approx(evaluate(V, c, edge.triangles[1], x, 0)).epsilon(1e-12));
  }
}

TEST_CASE("wall dofs") {
  const BackgroundMesh m(5);
  for (int deg : {1, 2}) {
    const FeSpace V = build_space(m, full(m), deg, 2);
    int count = 0;
    for (int node = 0; node < V.num_nodes(); ++node) {
      const Point& x = V.node_point(node);
      const bool wall = x.x() == 0.0 || x.x() == 1.0 || x.y() == 0.0 || x.y() == 1.0;
      for (int c = 0; c < 2; ++c) CHECK(V.is_wall_dof(V.dof(node, c)) == wall);
      count += wall ? 2 : 0;
    }
    CHECK(static_cast<int>(V.wall_dofs().size()) == count);
    CHECK(count == 2 * 4 * 5 * deg);
  }
  const FeSpace P0 = build_space(m, full(m), 0, 1);
  CHECK(P0.wall_dofs().empty());
}

TEST_CASE("lexicographic node order") {
  const BackgroundMesh m(3);
  const FeSpace V = build_space(m, full(m), 2, 1);
  for (int i = 1; i < V.num_nodes(); ++i) {
    const Point& a = V.node_point(i - 1);
    const Point& b = V.node_point(i);
    CHECK((a.x() < b.x() || (a.x() == b.x() && a.y() < b.y())));
  }
}

TEST_CASE("reconstruction extends the neighbor polynomial") {
  const BackgroundMesh mesh(40);
  CutGeometry cut(mesh, LevelSet{}, 8);
  cut.set_good_bad(classify_good_bad(cut, 0.1));
  REQUIRE(cut.good_bad().bad_count() > 0);
  std::vector<int> recon(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) recon[t] = cut.reconstruction_target(t);
  std::mt19937 rng(5);
  for (int deg : {1, 2}) {
    const FeSpace V = build_space(mesh, cut.extended(), deg, 1, recon);
    auto ell = [](const Point& x, int) { return 0.3 - 1.2 * x.x() + 0.7 * x.y() + 0.5 * x.x() * x.y(); };
    auto lin = [](const Point& x, int) { return 0.3 - 1.2 * x.x() + 0.7 * x.y(); };
    const Eigen::VectorXd c = interpolate(V, deg == 2 ? std::function<double(const Point&, int)>(ell)
                                                      : std::function<double(const Point&, int)>(lin));
    for (int t : cut.cut().members) {
      const ReconstructedEval r = eval_reconstructed(V, t, random_in_triangle(mesh.triangle_points(t), rng));
      if (cut.good_bad().good[t]) {
        CHECK(r.element == t);
      } else {
        const int tp = cut.good_bad().good_neighbor[t];
        CHECK(r.element == tp);
        // Value at a shared vertex matches the neighbor's basis there.
        const auto tv = mesh.triangle(t);
        const auto pv = mesh.triangle(tp);
        for (int v : tv) {
          if (std::find(pv.begin(), pv.end(), v) == pv.end()) continue;
          const ReconstructedEval rv = eval_reconstructed(V, t, mesh.vertex(v));
          const ShapeEval direct = eval_at(V, tp, mesh.vertex(v));
          for (int a = 0; a < direct.count; ++a) CHECK(rv.shape.value[a] == doctest::Approx(direct.value[a]));
        }
        // Polynomial reproduction through the extension.
        const Point x = random_in_triangle(mesh.triangle_points(t), rng);
        const ReconstructedEval rx = eval_reconstructed(V, t, x);
        const auto dofs = V.element_dofs(rx.element);
        double value = 0.0;
        for (int a = 0; a < rx.shape.count; ++a) value += rx.shape.value[a] * c[dofs[a]];
        const double exact = deg == 2 ? ell(x, 0) : lin(x, 0);
        CHECK(std::abs(value - exact) <= 1e-12);
      }
    }
  }
}
