#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "sv/mesh.hpp"
#include "sv/singularity.hpp"

using namespace sv;

namespace {

// Independent oracle: a vertex is singular exactly when its incident edges
// lie on at most two straight lines (directions counted modulo pi).
bool singular_by_line_count(const Triangulation& m, int z) {
  std::set<int> others;
  for (int t : m.vertex_tris[z])
    for (int v : m.triangles[t])
      if (v != z) others.insert(v);
  std::vector<double> dirs;
  for (int v : others) {
    // only edges of the mesh
    bool is_edge = false;
    for (const Edge& e : m.edges)
      if ((e.v0 == z && e.v1 == v) || (e.v0 == v && e.v1 == z)) is_edge = true;
    if (!is_edge) continue;
    Point2 d = m.vertices[v] - m.vertices[z];
    double ang = std::atan2(d.y, d.x);
    if (ang < 0) ang += M_PI;            // mod pi
    if (ang >= M_PI - 1e-9) ang -= M_PI;  // wrap
    dirs.push_back(ang);
  }
  std::sort(dirs.begin(), dirs.end());
  int lines = 0;
  double last = -10;
  for (double a : dirs) {
    if (a - last > 1e-9) {
      ++lines;
      last = a;
    }
  }
  return lines <= 2;
}

Triangulation figure_mesh() {
  // hexagonal domain with one crisscross square, one boundary chain of flat
  // vertices, and three plain triangles; the decomposition has cardinality 5
  std::vector<Point2> v = {
      {0, 2},                  // 0 A
      {1, 2},                  // 1 B
      {2, 2},                  // 2 C
      {2, 1},                  // 3 D
      {2, -1},                 // 4 G
      {0, -1},                 // 5 H
      {0, 1},                  // 6 F
      {1, 1},                  // 7 E
      {2. / 3., 1. / 3.},      // 8 I
      {1. / 3., -1. / 3.},     // 9 J = midpoint(I, H)
      {1.5, 1.5},              // 10 K center of the square B C D E
  };
  std::vector<std::array<int, 3>> t = {
      {7, 0, 6}, {0, 7, 1}, {4, 3, 7},            // plain
      {1, 10, 2}, {2, 10, 3}, {3, 10, 7}, {7, 10, 1},  // crisscross square
      {4, 9, 5}, {4, 8, 9}, {4, 7, 8}, {7, 6, 8},      // chain patch
  };
  return build_triangulation(std::move(v), std::move(t));
}

}  // namespace

TEST_CASE("theta from angle sequences") {
  CHECK(theta_from_angles({M_PI / 2, M_PI / 2, M_PI / 2, M_PI / 2}, true) ==
        doctest::Approx(0.0).epsilon(1e-15));
  std::vector<double> six(6, M_PI / 3);
  CHECK(theta_from_angles(six, true) ==
        doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
  CHECK(theta_from_angles({M_PI / 4, 3 * M_PI / 4}, false) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // single boundary triangle: empty maximum, singular by convention
  CHECK(theta_from_angles({1.234}, false) == 0.0);
}

TEST_CASE("theta invariance under cyclic shift and reversal") {
  std::vector<double> base{0.3, 0.7, 1.1, 0.9, 0.5, 2 * M_PI - 3.5};
  double t0 = theta_from_angles(base, true);
  for (size_t s = 1; s < base.size(); ++s) {
    std::vector<double> rot(base.begin() + s, base.end());
    rot.insert(rot.end(), base.begin(), base.begin() + s);
    CHECK(theta_from_angles(rot, true) == doctest::Approx(t0).epsilon(1e-14));
  }
  std::vector<double> bnd{0.4, 0.8, 0.6};
  std::vector<double> rev(bnd.rbegin(), bnd.rend());
  CHECK(theta_from_angles(bnd, false) ==
        doctest::Approx(theta_from_angles(rev, false)).epsilon(1e-14));
}

TEST_CASE("theta is invariant under permutation of the triangle list") {
  Triangulation m = generate_mesh(MeshKind::Crisscross, 2);
  std::vector<std::array<int, 3>> tris = m.triangles;
  // rotate the list and each triple; the canonical fan is rebuilt geometrically
  std::rotate(tris.begin(), tris.begin() + 5, tris.end());
  for (auto& t : tris) std::rotate(t.begin(), t.begin() + 1, t.end());
  Triangulation p = build_triangulation(m.vertices, tris);
  for (int z = 0; z < m.n_vertices(); ++z)
    CHECK(theta_vertex(m, z) == doctest::Approx(theta_vertex(p, z)).epsilon(1e-14));
}

TEST_CASE("classification against the two-line oracle") {
  auto check_mesh = [&](const Triangulation& m) {
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    for (int z = 0; z < m.n_vertices(); ++z)
      CHECK(cls.singular(z) == singular_by_line_count(m, z));
  };
  check_mesh(generate_mesh(MeshKind::Crisscross, 2));
  check_mesh(generate_mesh(MeshKind::Diagonal, 2));
  check_mesh(generate_mesh(MeshKind::PerturbedCrisscross, 2, 0.1));
  check_mesh(generate_mesh(MeshKind::BoundaryChain, 4));
  check_mesh(figure_mesh());
}

TEST_CASE("classification counts on the generator families") {
  SUBCASE("crisscross n=2: 4 interior singular, no boundary singular") {
    Triangulation m = generate_mesh(MeshKind::Crisscross, 2);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    CHECK(cls.count(VertexClass::InteriorSingular) == 4);
    CHECK(cls.count(VertexClass::BoundarySingular) == 0);
    for (int v = 9; v < 13; ++v)  // centers come after the grid vertices
      CHECK(cls.cls[v] == VertexClass::InteriorSingular);
  }
  SUBCASE("diagonal n=2: no interior singular") {
    Triangulation m = generate_mesh(MeshKind::Diagonal, 2);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    CHECK(cls.count(VertexClass::InteriorSingular) == 0);
    // the two one-triangle corners are boundary singular
    CHECK(cls.count(VertexClass::BoundarySingular) == 2);
  }
  SUBCASE("perturbed center is non-singular with theta matching the geometry") {
    Triangulation m = generate_mesh(MeshKind::PerturbedCrisscross, 1, 0.1);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    CHECK(cls.cls[4] == VertexClass::NonSingular);
    // oracle: recompute the fan angles from coordinates
    std::vector<double> angles;
    for (int t : m.vertex_tris[4]) angles.push_back(m.angle_at(t, 4));
    CHECK(cls.theta[4] ==
          doctest::Approx(theta_from_angles(angles, true)).epsilon(1e-14));
    CHECK(cls.theta[4] > 0.05);
  }
}

TEST_CASE("boundary singular chains") {
  SUBCASE("no boundary singular vertices: empty") {
    Triangulation m = generate_mesh(MeshKind::Crisscross, 2);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    CHECK(boundary_singular_chains(m, cls).empty());
  }
  SUBCASE("boundary_chain n=4 has one chain of length 3") {
    Triangulation m = generate_mesh(MeshKind::BoundaryChain, 4);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    auto chains = boundary_singular_chains(m, cls);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].size() == 3);
    // consecutive chain vertices are joined by boundary edges
    for (size_t i = 0; i + 1 < chains[0].size(); ++i) {
      bool found = false;
      for (const Edge& e : m.edges)
        if (e.boundary && ((e.v0 == chains[0][i] && e.v1 == chains[0][i + 1]) ||
                           (e.v1 == chains[0][i] && e.v0 == chains[0][i + 1])))
          found = true;
      CHECK(found);
    }
  }
  SUBCASE("two isolated singular corners give two chains of length 1") {
    Triangulation m = generate_mesh(MeshKind::Diagonal, 1);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    auto chains = boundary_singular_chains(m, cls);
    REQUIRE(chains.size() == 2);
    CHECK(chains[0].size() == 1);
    CHECK(chains[1].size() == 1);
  }
}

TEST_CASE("region decomposition") {
  SUBCASE("crisscross n=2: four interior singular patches, nothing else") {
    Triangulation m = generate_mesh(MeshKind::Crisscross, 2);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    auto dec = build_decomposition(m, cls);
    CHECK(dec.regions.size() == 4);
    for (const Region& r : dec.regions) {
      CHECK(r.kind == RegionKind::InteriorSingularPatch);
      CHECK(r.triangles.size() == 4);
      CHECK(r.theta_D > 0.0);
    }
  }
  SUBCASE("figure mesh decomposes into 5 regions") {
    Triangulation m = figure_mesh();
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    auto dec = build_decomposition(m, cls);
    CHECK(dec.regions.size() == 5);
    int plain = 0, patches = 0, chains = 0;
    for (const Region& r : dec.regions) {
      plain += r.kind == RegionKind::SingleTriangle;
      patches += r.kind == RegionKind::InteriorSingularPatch;
      chains += r.kind == RegionKind::BoundaryChainPatch;
    }
    CHECK(plain == 3);
    CHECK(patches == 1);
    CHECK(chains == 1);
  }
  SUBCASE("diagonal n=1: two one-triangle corner chains") {
    Triangulation m = generate_mesh(MeshKind::Diagonal, 1);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    auto dec = build_decomposition(m, cls);
    CHECK(dec.regions.size() == 2);
    for (const Region& r : dec.regions)
      CHECK(r.kind == RegionKind::BoundaryChainPatch);
  }
  SUBCASE("partition property on every family") {
    for (MeshKind kind : {MeshKind::Crisscross, MeshKind::Diagonal,
                          MeshKind::PerturbedCrisscross, MeshKind::BoundaryChain}) {
      Triangulation m = generate_mesh(kind, 3, 0.1);
      auto cls = classify_vertices(m, kGeneratedMeshTolerance);
      for (SpaceVariant variant : {SpaceVariant::Dirichlet, SpaceVariant::Slip}) {
        auto dec = build_decomposition(m, cls, variant);
        std::vector<int> covered(m.n_triangles(), 0);
        for (const Region& r : dec.regions) {
          for (int t : r.triangles) covered[t]++;
          // triangle sets within the patch, theta positive, diameter sane
          CHECK(r.theta_D > 0.0);
          CHECK(r.h_D > 0.0);
          std::set<int> p(r.patch_triangles.begin(), r.patch_triangles.end());
          for (int t : r.triangles) CHECK(p.count(t) == 1);
          // theta_D is the min over the region's non-singular vertices
          std::set<int> verts;
          for (int t : r.triangles)
            for (int v : m.triangles[t]) verts.insert(v);
          for (int v : verts)
            if (!cls.singular(v)) CHECK(r.theta_D <= cls.theta[v] + 1e-15);
        }
        for (int t = 0; t < m.n_triangles(); ++t) CHECK(covered[t] == 1);
      }
    }
  }
  SUBCASE("interior singular patches contain no other singular vertex") {
    for (int n : {1, 2, 4}) {
      Triangulation m = generate_mesh(MeshKind::Crisscross, n);
      auto cls = classify_vertices(m, kGeneratedMeshTolerance);
      auto dec = build_decomposition(m, cls);  // throws on violation
      for (const Region& r : dec.regions)
        if (r.kind == RegionKind::InteriorSingularPatch) {
          std::set<int> verts;
          for (int t : r.triangles)
            for (int v : m.triangles[t]) verts.insert(v);
          for (int v : verts)
            if (v != r.anchor) CHECK(!cls.singular(v));
        }
    }
  }
  SUBCASE("slip variant drops boundary chains") {
    Triangulation m = generate_mesh(MeshKind::BoundaryChain, 4);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    auto dir = build_decomposition(m, cls, SpaceVariant::Dirichlet);
    auto slip = build_decomposition(m, cls, SpaceVariant::Slip);
    CHECK(dir.regions.size() == 4);   // 3 plain + 1 chain patch
    CHECK(slip.regions.size() == 7);  // every triangle stands alone
    for (const Region& r : slip.regions)
      CHECK(r.kind == RegionKind::SingleTriangle);
  }
}

TEST_CASE("covering sets") {
  SUBCASE("single-triangle mesh") {
    Triangulation m = build_triangulation({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    auto dec = build_decomposition(m, cls);
    auto cs = covering_sets(m, dec, 0);
    CHECK(cs.region_ids.size() == 1);
    CHECK(cs.union_patch == std::vector<int>{0});
  }
  SUBCASE("oracle recomputation and uniform bound") {
    for (MeshKind kind : {MeshKind::Crisscross, MeshKind::Diagonal,
                          MeshKind::BoundaryChain}) {
      Triangulation m = generate_mesh(kind, 4);
      auto cls = classify_vertices(m, kGeneratedMeshTolerance);
      auto dec = build_decomposition(m, cls);
      for (int t = 0; t < m.n_triangles(); ++t) {
        auto cs = covering_sets(m, dec, t);
        // oracle: recompute C_h(T) from the definition
        std::vector<int> expect;
        for (int r = 0; r < int(dec.regions.size()); ++r) {
          const auto& pt = dec.regions[r].patch_triangles;
          if (std::find(pt.begin(), pt.end(), t) != pt.end()) expect.push_back(r);
        }
        CHECK(cs.region_ids == expect);
        CHECK(int(cs.region_ids.size()) <= 16);
        // the union patch contains every P(D) of the covering
        std::set<int> q(cs.union_patch.begin(), cs.union_patch.end());
        for (int r : cs.region_ids)
          for (int tt : dec.regions[r].patch_triangles) CHECK(q.count(tt) == 1);
      }
    }
  }
  SUBCASE("crisscross n=2 lower-left triangle is covered by its center patch") {
    Triangulation m = generate_mesh(MeshKind::Crisscross, 2);
    auto cls = classify_vertices(m, kGeneratedMeshTolerance);
    auto dec = build_decomposition(m, cls);
    auto cs = covering_sets(m, dec, 0);
    CHECK(cs.region_ids.size() >= 1);
    bool has_owner = false;
    for (int r : cs.region_ids) has_owner |= (r == dec.owner[0]);
    CHECK(has_owner);
  }
}

TEST_CASE("theta of triangle subsets") {
  Triangulation m = generate_mesh(MeshKind::Crisscross, 1);
  auto cls = classify_vertices(m, kGeneratedMeshTolerance);
  std::vector<int> all{0, 1, 2, 3};
  // corners have theta = 1 (right angles), the center is singular and excluded
  CHECK(theta_of(m, cls, all) == doctest::Approx(1.0).epsilon(1e-14));
}
