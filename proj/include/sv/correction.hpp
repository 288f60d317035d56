#pragma once

#include <Eigen/Dense>

#include "sv/fespaces.hpp"
#include "sv/fields.hpp"
#include "sv/singularity.hpp"

namespace sv {

/// Local correction operator on one region D, defined by the square system
///   int div(u) q dx = int div(v) q dx   for the local pressure basis q,
///   int u . w dx     = int v . w dx     for the local divergence-free basis w.
/// The system size is dimQ + dim0 = dimV and the matrix is invertible; the
/// operator is a projection onto the local velocity subspace.
struct LocalCorrectionOperator {
  const LocalVelocitySubspace* sub = nullptr;
  Eigen::MatrixXd system;
  Eigen::FullPivLU<Eigen::MatrixXd> lu;
  double sigma_min = 0.0;  // of the row-scaled system
  double sigma_max = 0.0;

  int size() const { return int(system.rows()); }
};

LocalCorrectionOperator build_local_correction(const VelocitySpace& V,
                                               const LocalVelocitySubspace& sub);

/// Coefficients of Pi2_D v in the subspace basis.
Eigen::VectorXd apply_pi2_local(const VelocitySpace& V,
                                const LocalCorrectionOperator& op,
                                const FieldExpr& v);

/// All regional operators of a decomposition plus the shared machinery to
/// apply the summed correction.
struct CorrectionOperator {
  const VelocitySpace* V = nullptr;
  const RegionDecomposition* dec = nullptr;
  std::vector<LocalVelocitySubspace> subspaces;
  std::vector<LocalCorrectionOperator> locals;
};

CorrectionOperator build_correction(const VelocitySpace& V,
                                    const VertexClassification& cls,
                                    const RegionDecomposition& dec, int threads = 1);

/// Global correction: the sum of the regional corrections in canonical region
/// order, as coefficients of the constrained velocity space.
Eigen::VectorXd apply_pi2_global(const CorrectionOperator& op, const FieldExpr& v,
                                 int threads = 1);

/// Mean-correcting bubble field on a 4-triangle interior singular patch.
/// With the patch triangles in clockwise order T_1..T_4 (starting at the
/// lowest triangle index) and shared edges e_i between T_i and T_{i+1}, the
/// building blocks are v_i = b_{e_i} n_i / c_i with the quadratic edge bubble
/// b_e (product of the endpoint barycentric coordinates), c_i = |e_i|/6 its
/// edge mean, and n_i the normal pointing out of T_i. Then
///   psi = a_1 v_1 + (a_1+a_2) v_2 + (a_1+a_2+a_3) v_3
/// satisfies int_{T_i} div(psi) = a_i whenever a_1+a_2+a_3+a_4 = 0.
struct EdgeBubblePsi {
  std::array<int, 4> tri_cw{};  // clockwise patch triangles
  PiecewisePolynomialField field;  // degree-k representation, supported on D
  Eigen::VectorXd space_coeffs;    // same field in the constrained space
};

EdgeBubblePsi edge_bubble_psi(const VelocitySpace& V, const Region& region,
                              const std::array<double, 4>& means_cw);

/// Clockwise triangle order of a 4-triangle interior patch, starting at the
/// lowest triangle index.
std::array<int, 4> patch_clockwise_order(const Triangulation& mesh,
                                         const Region& region);

struct RightInverseResult {
  Eigen::VectorXd space_coeffs;  // velocity with div v = q, supp in P(D)
  double residual = 0.0;         // ||div v - q||_{L2(D)} / ||q||_{L2(D)}
  bool support_ok = false;
  double measured_constant = 0.0;  // ||grad v||_{L^p(P(D))} / ||q||_{L^p(D)}
  bool used_edge_bubble = false;
};

/// Right inverse of the divergence on a region: for interior singular patches
/// the elementwise means are first matched by the explicit bubble field, the
/// remaining mean-free part (and every other region kind) is solved by the
/// minimum-norm coefficient solution of the local divergence system.
/// q is given by its ambient coefficients over the triangles of D.
RightInverseResult right_inverse_divergence(const VelocitySpace& V,
                                            const VertexClassification& cls,
                                            const Region& region,
                                            const LocalVelocitySubspace& sub,
                                            const Eigen::VectorXd& q_local,
                                            double p = 2.0);

}  // namespace sv
