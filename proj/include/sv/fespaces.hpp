#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sv/fields.hpp"
#include "sv/linalg.hpp"
#include "sv/mesh.hpp"
#include "sv/polynomials.hpp"
#include "sv/singularity.hpp"

namespace sv {

enum class BoundaryCondition { None, Dirichlet, Slip };

std::string to_string(BoundaryCondition bc);

inline BoundaryCondition bc_of(SpaceVariant v) {
  return v == SpaceVariant::Dirichlet ? BoundaryCondition::Dirichlet
                                      : BoundaryCondition::Slip;
}

/// Global continuous degree-k vector Lagrange space. The local-to-global node
/// map identifies shared vertex/edge lattice nodes across triangles; the
/// admissible velocity directions per node encode the boundary condition:
/// two directions at free nodes, the tangent at slip boundary nodes, none at
/// Dirichlet boundary nodes and pinned slip corners.
struct VelocitySpace {
  const Triangulation* mesh = nullptr;
  int k = 0;
  BoundaryCondition bc = BoundaryCondition::None;

  int n_nodes = 0;
  std::vector<std::vector<int>> tri_nodes;  // per triangle: lattice index -> node
  std::vector<Point2> node_pos;
  std::vector<NodeKind> node_kind;
  std::vector<int> node_parent;  // vertex / edge / triangle id
  std::vector<bool> node_boundary;
  std::vector<int> node_normal_count;               // boundary normals at the node
  std::vector<std::array<Point2, 2>> node_normals;  // distinct outward normals

  std::vector<int> ndirs;
  std::vector<std::array<Point2, 2>> dirs;
  std::vector<int> dof_start;  // prefix sums over ndirs
  int dim = 0;

  int nodal_dim() const { return 2 * n_nodes; }

  /// Space coefficients -> plain nodal values (2 per node).
  Eigen::VectorXd to_nodal(const Eigen::VectorXd& coeffs) const;
  /// Nodal values -> space coefficients by per-node projection onto the
  /// admissible directions (exact when the nodal field satisfies the bc).
  Eigen::VectorXd from_nodal(const Eigen::VectorXd& nodal) const;

  PiecewisePolynomialField nodal_to_field(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd field_to_nodal(const PiecewisePolynomialField& f) const;
};

VelocitySpace build_velocity_space(const Triangulation& mesh, int k,
                                   BoundaryCondition bc);

/// Nodal interpolation of a vector function given per-triangle (continuous
/// inputs give a conforming result).
Eigen::VectorXd interpolate_nodal(
    const VelocitySpace& V,
    const std::function<Point2(int tri, Point2 x)>& f);

/// Alternating one-sided vertex value functional around a singular vertex:
/// sum_j (-1)^(L-j) q|_{T_j}(z) in the canonical cyclic order (j = 1..L).
double alternating_vertex_functional(const Triangulation& mesh,
                                     const PiecewisePolynomialField& q, int z);

/// Discontinuous per-triangle polynomial coefficient space of degree km1
/// (the pressure ambient); columns of the global divergence matrix live here.
struct PressureAmbient {
  int km1 = 0;
  int per_tri = 0;
  int dim = 0;
};
inline PressureAmbient pressure_ambient(const Triangulation& mesh, int km1) {
  int per = TrianglePoly::ncoeffs(km1);
  return {km1, per, per * mesh.n_triangles()};
}

/// Constrained pressure space: mean-zero plus the alternating-vertex
/// constraints (all singular vertices for the Dirichlet variant, interior
/// singular only for slip), as an orthonormal coefficient basis of the
/// constraint null space.
struct PressureSpaceBasis {
  const Triangulation* mesh = nullptr;
  int km1 = 0;
  SpaceVariant variant = SpaceVariant::Dirichlet;
  std::vector<int> constrained_vertices;
  Eigen::MatrixXd constraints;  // rows x ambient
  int rank = 0;
  Eigen::MatrixXd basis;  // ambient x dim, orthonormal columns

  int ambient_dim() const { return int(basis.rows()); }
  int dim() const { return int(basis.cols()); }
  PiecewisePolynomialField element_field(int i) const;
  PiecewisePolynomialField coeffs_to_field(const Eigen::VectorXd& ambient) const;
};

PressureSpaceBasis build_pressure_space(const Triangulation& mesh, int km1,
                                        const VertexClassification& cls,
                                        SpaceVariant variant);

/// Same constraint set plus one vanishing-mean row per region: the pressures
/// with zero mean on every region of the decomposition.
PressureSpaceBasis build_pressure_space_region_mean_free(
    const Triangulation& mesh, int km1, const VertexClassification& cls,
    const RegionDecomposition& dec);

/// As above but with a vanishing mean on every triangle.
PressureSpaceBasis build_pressure_space_triangle_mean_free(
    const Triangulation& mesh, int km1, const VertexClassification& cls,
    SpaceVariant variant);

/// Global divergence operator: plain nodal velocity values -> pressure
/// ambient coefficients of the elementwise divergence.
Eigen::SparseMatrix<double> divergence_matrix(const VelocitySpace& V);

/// Dense divergence restricted to the constrained space coefficients.
Eigen::MatrixXd divergence_matrix_on_space(const VelocitySpace& V);

/// The local velocity subspace of a region D: fields of the global
/// constrained space supported in P(D) whose divergence is a constrained
/// pressure supported in D; plus its divergence-free part and the local
/// pressure space, all as orthonormal coefficient bases.
struct LocalVelocitySubspace {
  int region = -1;
  std::vector<int> space_dofs;       // columns into the global space
  std::vector<int> d_tris, p_tris;   // D and P(D)
  Eigen::MatrixXd basis;             // |space_dofs| x dimV
  Eigen::MatrixXd divfree;           // |space_dofs| x dim0
  Eigen::MatrixXd pressure;          // (per_tri*|D|) x dimQ, orthonormal
  Eigen::MatrixXd div_in_pressure;   // dimQ x dimV: div in pressure-basis coords
  Eigen::MatrixXd div_on_d_ambient;  // (per_tri*|D|) x dimV: raw div coefficients
  double inclusion_residual = 0.0;   // range of div vs local pressure space
  int div_rank = 0;

  int dimV() const { return int(basis.cols()); }
  int dimQ() const { return int(pressure.cols()); }
  int dim0() const { return int(divfree.cols()); }

  /// Local pressure basis element as a field (zero outside D).
  PiecewisePolynomialField pressure_field(const Triangulation& mesh, int i) const;
  PiecewisePolynomialField pressure_coeffs_to_field(const Triangulation& mesh,
                                                    const Eigen::VectorXd& c) const;
  /// Subspace element (coords in `basis`) as space coefficients.
  Eigen::VectorXd to_space(const VelocitySpace& V, const Eigen::VectorXd& c) const;
  /// Coordinates of a local pressure (ambient coeffs over D) in the
  /// orthonormal local basis, plus the projection residual.
  std::pair<Eigen::VectorXd, double> pressure_coords(const Eigen::VectorXd& local_amb) const;
};

LocalVelocitySubspace local_velocity_subspace(const VelocitySpace& V,
                                              const VertexClassification& cls,
                                              SpaceVariant variant,
                                              const Region& region, int region_id = -1);

/// Variant-dependent constrained singular vertices among the vertices of a
/// triangle set.
std::vector<int> constrained_vertices_in(const Triangulation& mesh,
                                         const VertexClassification& cls,
                                         SpaceVariant variant,
                                         const std::vector<int>& tris);

}  // namespace sv
