#include <random>

#include "doctest.h"
#include "sv/catalog.hpp"
#include "sv/harness.hpp"
#include "sv/quasi_interp.hpp"

using namespace sv;

namespace {

Eigen::VectorXd random_vec(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST_CASE("projection on discrete fields and constants") {
  Triangulation m = generate_mesh(MeshKind::Crisscross, 2);
  VelocitySpace V = build_velocity_space(m, 4, BoundaryCondition::None);
  QuasiInterpolant op = build_quasi_interpolant(V);
  std::mt19937_64 rng(2);

  SUBCASE("random discrete fields reproduce coefficient-exactly") {
    for (int rep = 0; rep < 4; ++rep) {
      Eigen::VectorXd nodal = random_vec(V.nodal_dim(), rng);
      PiecewisePolynomialField f = V.nodal_to_field(nodal);
      Eigen::VectorXd out = apply_pi1(op, FieldExpr::of(f));
      CHECK((out - nodal).lpNorm<Eigen::Infinity>() < 1e-12 * 1.0);
    }
  }
  SUBCASE("constants reproduce") {
    PiecewisePolynomialField f(m, 2, 4);
    for (int t = 0; t < m.n_triangles(); ++t) {
      TrianglePoly c1(0), c2(0);
      c1.c[0] = 1.0;
      c2.c[0] = 2.0;
      f.poly(t, 0) = c1.raised_to(4);
      f.poly(t, 1) = c2.raised_to(4);
    }
    Eigen::VectorXd out = apply_pi1(op, FieldExpr::of(f));
    for (int n = 0; n < V.n_nodes; ++n) {
      CHECK(out[2 * n] == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(out[2 * n + 1] == doctest::Approx(2.0).epsilon(1e-13));
    }
  }
  SUBCASE("idempotent on analytic inputs") {
    const AnalyticField& f = field_by_name("sinsin");
    Eigen::VectorXd once = apply_pi1(op, FieldExpr::of(f));
    PiecewisePolynomialField fh = V.nodal_to_field(once);
    Eigen::VectorXd twice = apply_pi1(op, FieldExpr::of(fh));
    CHECK((twice - once).lpNorm<Eigen::Infinity>() <
          1e-12 * std::max(1.0, once.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("elementwise divergence means and edge fluxes are preserved") {
  for (MeshKind kind : {MeshKind::Crisscross, MeshKind::BoundaryChain}) {
    Triangulation m = generate_mesh(kind, 2);
    VelocitySpace V = build_velocity_space(m, 4, BoundaryCondition::None);
    QuasiInterpolant op = build_quasi_interpolant(V);
    const AnalyticField& f = field_by_name("sinsin");
    Eigen::VectorXd nodal = apply_pi1(op, FieldExpr::of(f));
    PiecewisePolynomialField fh = V.nodal_to_field(nodal);
    FieldExpr defect = FieldExpr::of(f);
    defect.add(fh, -1.0);
    double scale = std::max(1.0, nodal.lpNorm<Eigen::Infinity>());
    // mean normal flux on every edge
    for (int e = 0; e < m.n_edges(); ++e)
      CHECK(std::abs(edge_flux(m, defect, e, m.edges[e].t0)) / scale < 1e-11);
    // hence the divergence mean on every triangle
    for (int t = 0; t < m.n_triangles(); ++t) {
      TrianglePoly one(0);
      one.c[0] = 1.0;
      CHECK(std::abs(pair_divergence(m, defect, t, one)) / scale < 1e-11);
    }
  }
}

TEST_CASE("discrete boundary traces are preserved") {
  Triangulation m = generate_mesh(MeshKind::Crisscross, 2);
  VelocitySpace V = build_velocity_space(m, 4, BoundaryCondition::None);
  QuasiInterpolant op = build_quasi_interpolant(V);
  std::mt19937_64 rng(7);
  const AnalyticField& bump = field_by_name("bump");
  for (int rep = 0; rep < 3; ++rep) {
    Eigen::VectorXd nodal = random_vec(V.nodal_dim(), rng);
    PiecewisePolynomialField vh = V.nodal_to_field(nodal);
    FieldExpr v = FieldExpr::of(vh);
    v.add(bump, 1.3);  // zero-trace interior perturbation
    Eigen::VectorXd out = apply_pi1(op, v);
    for (int n = 0; n < V.n_nodes; ++n) {
      if (!V.node_boundary[n]) continue;
      CHECK(std::abs(out[2 * n] - nodal[2 * n]) < 1e-12);
      CHECK(std::abs(out[2 * n + 1] - nodal[2 * n + 1]) < 1e-12);
    }
  }
}

TEST_CASE("zero normal trace is preserved away from corners") {
  Triangulation m = generate_mesh(MeshKind::Crisscross, 2);
  VelocitySpace V = build_velocity_space(m, 4, BoundaryCondition::None);
  QuasiInterpolant op = build_quasi_interpolant(V);
  const AnalyticField& vortex = field_by_name("vortex");  // v.n = 0 on the square
  Eigen::VectorXd out = apply_pi1(op, FieldExpr::of(vortex));
  double scale = std::max(1.0, out.lpNorm<Eigen::Infinity>());
  for (int n = 0; n < V.n_nodes; ++n) {
    if (!V.node_boundary[n]) continue;
    for (int i = 0; i < V.node_normal_count[n] && i < 2; ++i) {
      Point2 nn = V.node_normals[n][i];
      CHECK(std::abs(out[2 * n] * nn.x + out[2 * n + 1] * nn.y) / scale < 1e-12);
    }
  }
}

TEST_CASE("locality: values on T depend only on the input near T") {
  Triangulation m = generate_mesh(MeshKind::Crisscross, 4);
  VelocitySpace V = build_velocity_space(m, 4, BoundaryCondition::None);
  QuasiInterpolant op = build_quasi_interpolant(V);
  const AnalyticField& f = field_by_name("expwave");
  AnalyticField far = box_bump(0.75, 1.0, 0.75, 1.0);

  FieldExpr v1 = FieldExpr::of(f);
  FieldExpr v2 = FieldExpr::of(f);
  v2.add(far, 2.0);
  Eigen::VectorXd a = apply_pi1(op, v1);
  Eigen::VectorXd b = apply_pi1(op, v2);
  // nodes of the lower-left triangle are far from the bump support: bitwise
  // identical results
  for (int i = 0; i < lagrange_basis(4).size(); ++i) {
    int n = V.tri_nodes[0][i];
    CHECK(a[2 * n] == b[2 * n]);
    CHECK(a[2 * n + 1] == b[2 * n + 1]);
  }
}

TEST_CASE("approximation study") {
  const AnalyticField& f = field_by_name("sinsin");
  auto meshes = refinement_chain(MeshKind::Crisscross, 2, 0.0, 3);

  SUBCASE("full order in L2 for the smooth field at k=4") {
    auto rows = pi1_approximation_report(f, meshes, 4, 0, 2.0);
    REQUIRE(rows.size() == 3);
    CHECK(rows.back().order == doctest::Approx(5.0).epsilon(0.06));
  }
  SUBCASE("polynomials of degree <= k reproduce on every level") {
    const AnalyticField& p4 = field_by_name("poly4");
    auto rows = pi1_approximation_report(p4, meshes, 4, 0, 2.0);
    for (const auto& r : rows) CHECK(r.error < 1e-11);
  }
  SUBCASE("gradient errors stay bounded under refinement") {
    auto rows = pi1_approximation_report(f, meshes, 4, 1, 2.0);
    for (size_t i = 1; i < rows.size(); ++i)
      CHECK(rows[i].error < 1.5 * rows[i - 1].error + 1e-12);
  }
}
