#pragma once

#include <Eigen/Dense>

#include "sv/fespaces.hpp"
#include "sv/fields.hpp"

namespace sv {

/// Trace-preserving quasi-interpolant onto the degree-k vector Lagrange space
/// (k >= 2), built in two stages:
///
///  1. Scott-Zhang averaging: every node value is the L2-dual average of the
///     input over an assigned set. Boundary nodes average over a boundary
///     edge containing them (corners solve a 2x2 system pairing the normal
///     moments of both incident boundary edges), interior nodes over their
///     lowest-index containing triangle.
///  2. Flux correction: for every edge, a multiple of the central edge-node
///     basis function times the edge normal restores the mean normal flux.
///     That function has nonzero mean flux on its own edge and zero mean flux
///     on every other edge, so the corrections decouple.
/// The result is a projection; it preserves the elementwise mean of the
/// divergence, the mean normal flux on every edge, discrete boundary traces,
/// and discrete normal boundary traces.
///
/// Regions with an odd-fan singular corner vertex (one-triangle corners)
/// carry one constrained-pressure mode whose divergence pairing no conforming
/// trace-and-flux-preserving operator can match: divergences of admissible
/// fields have zero alternating functionals and zero elementwise means, which
/// confines them to the orthogonal complement of that mode. The composed
/// projection therefore preserves the divergence pairing against the full
/// constrained pressure space exactly on meshes whose singular vertices all
/// have even fans, and up to the corner modes otherwise.
struct QuasiInterpolant {
  const VelocitySpace* V = nullptr;  // bc == None: the full space

  struct NodeAssignment {
    enum class Kind { EdgeAverage, TriangleAverage, CornerNormalPair } kind =
        Kind::TriangleAverage;
    int primary = -1;    // edge or triangle id
    int secondary = -1;  // second edge for corners
  };
  std::vector<NodeAssignment> assign;

  // per edge: central edge node and its mean flux normalizer
  std::vector<int> edge_center_node;
  std::vector<double> edge_center_mean;  // int_e phi_center ds

  // dual mass inverses on the reference edge and triangle
  Eigen::MatrixXd edge_mass_inv;  // (k+1) x (k+1)
  Eigen::MatrixXd tri_mass_inv;  // n_loc x n_loc (reference area normalization)

};

QuasiInterpolant build_quasi_interpolant(const VelocitySpace& V);

/// Nodal coefficients of the interpolant (all 2N values).
Eigen::VectorXd apply_pi1(const QuasiInterpolant& op, const FieldExpr& v);

struct StudyRow {
  int level = 0;
  double h = 0.0;
  int dofs = 0;
  double error = 0.0;      // aggregated L^p error
  double max_local = 0.0;  // max over triangles of the local error
  double order = 0.0;      // log2(e_prev / e) against the previous level
};

/// Refinement study of || grad^j (v - Pi1 v) ||_{L^p} over the given meshes.
std::vector<StudyRow> pi1_approximation_report(const AnalyticField& v,
                                               const std::vector<Triangulation>& meshes,
                                               int k, int j, double p);

}  // namespace sv
