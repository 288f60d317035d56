#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "sv/geometry.hpp"

namespace sv {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class InvalidParameter : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  int v0 = -1, v1 = -1;   // v0 < v1
  int t0 = -1, t1 = -1;   // adjacent triangles, t1 == -1 on the boundary
  bool boundary = false;
  double length = 0.0;
  Point2 normal{};        // unit normal (v1-v0 rotated by -90 deg); outward for
                          // boundary edges
};

/// Conforming triangulation of a polygonal domain. Immutable after
/// construction; safe to share read-only across threads.
///
/// vertex_tris holds, per vertex, the incident triangles in the canonical
/// cyclic order: consecutive entries share an edge, the walk runs
/// counterclockwise around the vertex, boundary vertices start and end at a
/// triangle with a boundary edge, and interior walks start at the triangle
/// with the smallest index.
struct Triangulation {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;  // ccw vertex triples
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> tri_edges;  // edge opposite local vertex i
  std::vector<std::array<int, 3>> neighbors;  // triangle across that edge, -1 if none
  std::vector<bool> boundary_vertex;
  std::vector<std::vector<int>> vertex_tris;

  std::vector<TriangleGeom> geom;
  double h_max = 0.0;

  int n_vertices() const { return int(vertices.size()); }
  int n_triangles() const { return int(triangles.size()); }
  int n_edges() const { return int(edges.size()); }

  int local_vertex(int t, int v) const {
    for (int i = 0; i < 3; ++i)
      if (triangles[t][i] == v) return i;
    return -1;
  }

  /// Interior angle of triangle t at vertex v (radians).
  double angle_at(int t, int v) const;
};

struct MeshQuality {
  double h_max = 0.0;
  std::vector<double> h_T;
  double shape_regularity = 0.0;  // max over T of diam(T)/inradius(T)
};

/// Validates and derives all tables. Triangles given clockwise are reoriented.
/// Throws TopologyError on non-conforming input (edge shared by >2 triangles,
/// degenerate triangle, duplicate or isolated vertex, non-disk vertex patch).
Triangulation build_triangulation(std::vector<Point2> vertices,
                                  std::vector<std::array<int, 3>> triangles);

/// Line-oriented text format: "v <x> <y>" and "t <i> <j> <k>" records,
/// '#' starts a comment. Vertex indices are 0-based in file order.
Triangulation load_mesh(const std::string& path);
void save_mesh(const Triangulation& mesh, const std::string& path);

enum class MeshKind { Diagonal, Crisscross, PerturbedCrisscross, BoundaryChain };

MeshKind mesh_kind_from_string(const std::string& s);
std::string to_string(MeshKind k);

/// Structured families on the unit square.
///  - diagonal: n x n squares, each split by its (i+1,j)-(i,j+1) diagonal;
///  - crisscross: each square split into 4 by both diagonals;
///  - perturbed_crisscross: crisscross with every center moved by (eps/n, 0);
///  - boundary_chain: fan strip whose interior bottom vertices have exactly
///    two incident triangles on a flat boundary (n-1 of them, n >= 2).
Triangulation generate_mesh(MeshKind kind, int n, double eps = 0.0);

/// Incident triangles of z in canonical cyclic order together with the patch
/// diameter h_z = diam(Omega_h(z)).
std::pair<std::vector<int>, double> vertex_patch(const Triangulation& mesh, int z);

/// Edge-midpoint refinement: every triangle into 4 congruent children.
Triangulation refine_uniform(const Triangulation& mesh);

MeshQuality mesh_quality(const Triangulation& mesh);

/// Diameter of a set of triangles (max pairwise vertex distance).
double triangle_set_diameter(const Triangulation& mesh, const std::vector<int>& tris);

}  // namespace sv
