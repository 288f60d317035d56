#include <cmath>
#include <random>

#include "doctest.h"
#include "sv/polynomials.hpp"
#include "sv/quadrature.hpp"

using namespace sv;

namespace {

const TriangleGeom kRef({0, 0}, {1, 0}, {0, 1});

TrianglePoly random_poly(int deg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TrianglePoly p(deg);
  for (double& c : p.c) c = u(rng);
  return p;
}

// x and y as barycentric polynomials on a triangle: x = sum x_i lambda_i
TrianglePoly coordinate_poly(const TriangleGeom& g, int dir) {
  TrianglePoly p(1);
  p.c[TrianglePoly::index(1, 1, 0)] = dir == 0 ? g.p[0].x : g.p[0].y;
  p.c[TrianglePoly::index(1, 0, 1)] = dir == 0 ? g.p[1].x : g.p[1].y;
  p.c[TrianglePoly::index(1, 0, 0)] = dir == 0 ? g.p[2].x : g.p[2].y;
  return p;
}

}  // namespace

TEST_CASE("monomial integrals on a triangle") {
  TriangleGeom g({0.2, -0.1}, {1.3, 0.4}, {0.3, 1.7});
  CHECK(integrate_monomial(g, 0, 0, 0) == doctest::Approx(g.area).epsilon(1e-14));
  CHECK(integrate_monomial(g, 1, 0, 0) == doctest::Approx(g.area / 3.0).epsilon(1e-14));
  CHECK(integrate_monomial(g, 1, 1, 0) == doctest::Approx(g.area / 12.0).epsilon(1e-14));
  // cross-check against quadrature
  const TriangleRule& rule = triangle_rule(12);
  double q = 0.0;
  for (size_t i = 0; i < rule.bary.size(); ++i)
    q += rule.w[i] * rule.bary[i][0] * rule.bary[i][0] * rule.bary[i][1];
  q *= 2.0 * g.area;
  CHECK(integrate_monomial(g, 2, 1, 0) == doctest::Approx(q).epsilon(1e-13));
}

TEST_CASE("product integration matches pairing route") {
  std::mt19937_64 rng(7);
  TriangleGeom g({0, 0}, {0.9, 0.2}, {-0.1, 1.1});
  for (int k : {1, 2, 4, 6}) {
    for (int rep = 0; rep < 5; ++rep) {
      TrianglePoly p = random_poly(2 * k, rng), q = random_poly(2 * k, rng);
      double direct = integrate(p * q, g);
      double paired = pair_L2(p, q, g);
      double scale = std::max(1.0, std::abs(direct));
      CHECK(std::abs(direct - paired) / scale < 1e-13);
    }
  }
}

TEST_CASE("divergence of simple fields") {
  TriangleGeom g({0, 0}, {1, 0}, {0, 1});
  TrianglePoly x = coordinate_poly(g, 0), y = coordinate_poly(g, 1);

  SUBCASE("identity field has divergence 2") {
    TrianglePoly d = divergence(x, y, g);
    CHECK(d.degree == 0);
    CHECK(d.c[0] == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("rotation is divergence free") {
    TrianglePoly my = y;
    my *= -1.0;
    TrianglePoly d = divergence(my, x, g);
    for (double c : d.c) CHECK(std::abs(c) < 1e-14);
  }
  SUBCASE("v = (x^2, 0) against finite differences") {
    TrianglePoly x2 = x * x;
    TrianglePoly zero(2);
    TrianglePoly d = divergence(x2, zero, g);  // expect 2x
    double h = 1e-6;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.15, 0.35);
    for (int i = 0; i < 5; ++i) {
      Point2 pt{u(rng), u(rng)};
      double fd = (x2.eval(g.barycentric({pt.x + h, pt.y})) -
                   x2.eval(g.barycentric({pt.x - h, pt.y}))) /
                  (2 * h);
      CHECK(d.eval(g.barycentric(pt)) == doctest::Approx(fd).epsilon(1e-8));
      CHECK(d.eval(g.barycentric(pt)) == doctest::Approx(2 * pt.x).epsilon(1e-12));
    }
  }
  SUBCASE("divergence annihilates constants and is linear") {
    TrianglePoly c1(0), c2(0);
    c1.c[0] = 3.5;
    c2.c[0] = -1.25;
    TrianglePoly d = divergence(c1.raised_to(2), c2.raised_to(2), g);
    for (double c : d.c) CHECK(std::abs(c) < 1e-14);
  }
}

TEST_CASE("edge restriction and normal moments") {
  TriangleGeom g({0, 0}, {1, 0}, {0, 1});

  SUBCASE("constant field along the vertical edge") {
    // edge from (0,0) to (0,1) is opposite local vertex 1; outward normal (-1,0)
    TrianglePoly one(0);
    one.c[0] = 1.0;
    TrianglePoly zero(0);
    EdgePoly q(0);
    q.c[0] = 1.0;
    double m = edge_normal_moment(one, zero, g, 1, q);
    CHECK(m == doctest::Approx(-1.0).epsilon(1e-14));
  }
  SUBCASE("edge bubble normal moment is |e|/6") {
    // bubble on edge opposite vertex 0: product of the endpoint coordinates
    TrianglePoly l1(1), l2(1);
    l1.c[TrianglePoly::index(1, 0, 1)] = 1.0;  // lambda_2
    l2.c[TrianglePoly::index(1, 0, 0)] = 1.0;  // lambda_3
    TrianglePoly bubble = l1 * l2;
    // field = bubble * n, n outward unit normal of that edge
    double len = g.edge_length(0);
    Point2 t = g.p[2] - g.p[1];
    Point2 n{t.y / len, -t.x / len};
    TrianglePoly fx = bubble, fy = bubble;
    fx *= n.x;
    fy *= n.y;
    EdgePoly q(0);
    q.c[0] = 1.0;
    CHECK(edge_normal_moment(fx, fy, g, 0, q) ==
          doctest::Approx(len / 6.0).epsilon(1e-13));
  }
  SUBCASE("tangential fields have zero moment for any q") {
    std::mt19937_64 rng(11);
    double len = g.edge_length(2);  // edge (0,0)-(1,0), tangent (1,0)
    (void)len;
    for (int deg = 0; deg <= 3; ++deg) {
      TrianglePoly fx = random_poly(2, rng);
      TrianglePoly fy(2);  // zero y-component: tangential to the bottom edge
      EdgePoly q(deg);
      for (double& c : q.c) c = 1.0;
      CHECK(std::abs(edge_normal_moment(fx, fy, g, 2, q)) < 1e-14);
    }
  }
}

TEST_CASE("1D edge integral identity") {
  // int_e la^m lb^n ds = |e| m! n! / (m+n+1)!
  EdgePoly p(3);
  p.c[2] = 1.0;  // la^2 lb
  CHECK(integrate_edge(p, 2.0) ==
        doctest::Approx(2.0 * 2.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("lagrange basis on the principal lattice") {
  SUBCASE("k=1 gives vertex hats") {
    const LagrangeBasis& B = lagrange_basis(1);
    CHECK(B.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(B.kind[i] == NodeKind::Vertex);
      for (int j = 0; j < 3; ++j)
        CHECK(B.phi[i].eval(B.node_bary(j)) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
    }
  }
  SUBCASE("k=4 node counts and kinds") {
    const LagrangeBasis& B = lagrange_basis(4);
    CHECK(B.size() == 15);
    int nv = 0, ne = 0, ni = 0;
    for (int i = 0; i < B.size(); ++i) {
      if (B.kind[i] == NodeKind::Vertex) ++nv;
      if (B.kind[i] == NodeKind::Edge) ++ne;
      if (B.kind[i] == NodeKind::Interior) ++ni;
    }
    CHECK(nv == 3);
    CHECK(ne == 9);
    CHECK(ni == 3);
  }
  SUBCASE("duality and partition of unity in coefficient form") {
    for (int k : {2, 4, 5}) {
      const LagrangeBasis& B = lagrange_basis(k);
      for (int i = 0; i < B.size(); ++i)
        for (int j = 0; j < B.size(); ++j)
          CHECK(B.phi[i].eval(B.node_bary(j)) ==
                doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
      TrianglePoly sum(k);
      for (int i = 0; i < B.size(); ++i) sum.axpy(1.0, B.phi[i]);
      TrianglePoly one(0);
      one.c[0] = 1.0;
      TrianglePoly diff = sum - one.raised_to(k);
      CHECK(diff.max_abs_coeff() < 1e-12);
    }
  }
  SUBCASE("interpolation reproduces polynomials of degree <= k") {
    std::mt19937_64 rng(5);
    for (int k : {2, 4}) {
      const LagrangeBasis& B = lagrange_basis(k);
      TrianglePoly p = random_poly(k, rng);
      TrianglePoly interp(k);
      for (int i = 0; i < B.size(); ++i)
        interp.axpy(p.eval(B.node_bary(i)), B.phi[i]);
      CHECK((interp - p).max_abs_coeff() < 1e-11 * std::max(1.0, p.max_abs_coeff()));
    }
  }
}

TEST_CASE("gauss and triangle rules integrate polynomials") {
  const GaussRule& g1 = gauss_rule(16);
  double s = 0.0;
  for (size_t i = 0; i < g1.x.size(); ++i) s += g1.w[i] * std::pow(g1.x[i], 9);
  CHECK(s == doctest::Approx(0.1).epsilon(1e-14));

  TriangleGeom g({0, 0}, {1, 0}, {0, 1});
  const TriangleRule& tr = triangle_rule(12);
  double acc = 0.0;
  for (size_t i = 0; i < tr.bary.size(); ++i) {
    Point2 x = g.point(tr.bary[i]);
    acc += tr.w[i] * std::sin(M_PI * x.x) * std::sin(M_PI * x.y);
  }
  acc *= 2.0 * g.area;
  // reference from splitting the unit square: int over triangle is half of
  // the square integral by symmetry across the diagonal
  double square = 4.0 / (M_PI * M_PI);
  CHECK(acc == doctest::Approx(square / 2.0).epsilon(1e-12));
}

TEST_CASE("edge normal moments are antisymmetric across a shared edge") {
  // two triangles over the shared edge (0,0)-(1,1); a globally continuous
  // quadratic field has opposite outward normal moments from the two sides
  TriangleGeom left({0, 0}, {1, 1}, {0, 1});
  TriangleGeom right({0, 0}, {1, 0}, {1, 1});
  auto components = [](Point2 p) {
    return Point2{p.x * p.x + p.y, p.x - p.y * p.y};
  };
  auto interpolate = [&](const TriangleGeom& g, int comp) {
    const LagrangeBasis& B = lagrange_basis(2);
    TrianglePoly out(2);
    for (int i = 0; i < B.size(); ++i) {
      Point2 x = g.point(B.node_bary(i));
      Point2 v = components(x);
      out.axpy(comp == 0 ? v.x : v.y, B.phi[i]);
    }
    return out;
  };
  TrianglePoly lx = interpolate(left, 0), ly = interpolate(left, 1);
  TrianglePoly rx = interpolate(right, 0), ry = interpolate(right, 1);
  // the shared edge is opposite local vertex 2 on the left and 1 on the
  // right; q constant so the parametrization direction does not matter
  EdgePoly one(0);
  one.c[0] = 1.0;
  double ml = edge_normal_moment(lx, ly, left, 2, one);
  double mr = edge_normal_moment(rx, ry, right, 1, one);
  CHECK(ml + mr == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(std::abs(ml) > 0.1);  // a nontrivial cancellation
}
