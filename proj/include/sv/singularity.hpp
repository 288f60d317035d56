#pragma once

#include <limits>
#include <string>
#include <vector>

#include "sv/mesh.hpp"

namespace sv {

enum class VertexClass { NonSingular, InteriorSingular, BoundarySingular };

/// Theta values and the singular/non-singular split of the vertex set.
/// A vertex is singular when all its incident edges lie on at most two
/// straight lines; Theta measures the distance from that configuration as the
/// largest |sin| of a consecutive angle-pair sum. Boundary vertices with a
/// single incident triangle maximize over an empty set; they are treated as
/// singular (theta = 0), the classical corner case.
struct VertexClassification {
  std::vector<double> theta;
  std::vector<VertexClass> cls;
  double singular_tolerance = 0.0;

  bool singular(int z) const { return cls[z] != VertexClass::NonSingular; }
  int count(VertexClass c) const;
};

/// Theta from the ordered fan angles alone. For interior vertices the
/// consecutive pairs wrap around; for boundary vertices they do not.
double theta_from_angles(const std::vector<double>& angles, bool interior);

double theta_vertex(const Triangulation& mesh, int z);

constexpr double kGeneratedMeshTolerance = 1e-12;
constexpr double kLoadedMeshTolerance = 1e-9;

VertexClassification classify_vertices(const Triangulation& mesh, double tol);

/// Maximal chains of boundary singular vertices connected by boundary edges,
/// each ordered along the boundary path (deterministically from the endpoint
/// with the smaller vertex index).
std::vector<std::vector<int>> boundary_singular_chains(const Triangulation& mesh,
                                                       const VertexClassification& cls);

enum class RegionKind { SingleTriangle, InteriorSingularPatch, BoundaryChainPatch };

std::string to_string(RegionKind k);

struct Region {
  RegionKind kind = RegionKind::SingleTriangle;
  std::vector<int> triangles;        // the set D
  std::vector<int> patch_triangles;  // P(D)
  double theta_D = 0.0;              // min Theta over non-singular vertices of D
  double h_D = 0.0;                  // diam(D)
  int anchor = -1;                   // vertex id, chain id, or triangle id
};

enum class SpaceVariant { Dirichlet, Slip };

std::string to_string(SpaceVariant v);

/// Non-overlapping decomposition of the mesh into single non-singular
/// triangles, interior singular vertex patches and boundary chain patches.
/// The slip variant drops the boundary chains: its single-triangle part is
/// every triangle without an interior singular vertex.
struct RegionDecomposition {
  SpaceVariant variant = SpaceVariant::Dirichlet;
  std::vector<Region> regions;             // canonical order: kind, then anchor
  std::vector<std::vector<int>> chains;    // always the Dirichlet-variant chains
  std::vector<int> owner;                  // per triangle: region containing it
  std::vector<std::vector<int>> covering;  // per triangle: regions D with T in P(D)
};

RegionDecomposition build_decomposition(const Triangulation& mesh,
                                        const VertexClassification& cls,
                                        SpaceVariant variant = SpaceVariant::Dirichlet);

struct CoveringSets {
  std::vector<int> region_ids;      // C_h(T)
  std::vector<int> union_patch;     // Q(T): union of P(D) over C_h(T)
  std::vector<int> patch_of_union;  // P(Q(T))
};

CoveringSets covering_sets(const Triangulation& mesh, const RegionDecomposition& dec,
                           int t);

/// P(M) for an arbitrary triangle set M: the union of vertex patches over all
/// vertices of M.
std::vector<int> patch_of(const Triangulation& mesh, const std::vector<int>& tris);

/// Theta of a sub-triangulation: min Theta over its non-singular vertices
/// (+infinity when it has none).
double theta_of(const Triangulation& mesh, const VertexClassification& cls,
                const std::vector<int>& tris);

}  // namespace sv
