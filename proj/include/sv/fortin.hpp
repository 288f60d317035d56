#pragma once

#include "sv/correction.hpp"
#include "sv/quasi_interp.hpp"

namespace sv {

/// Composed Fortin projection: quasi-interpolant plus the summed local
/// correction of the interpolation defect. Preserves the divergence against
/// the full constrained pressure space, boundary data of discrete type, and
/// is local at patch scale.
struct FortinOperator {
  SpaceVariant variant = SpaceVariant::Dirichlet;
  const Triangulation* mesh = nullptr;
  VelocitySpace full;         // bc none: target of the quasi-interpolant
  VelocitySpace constrained;  // Dirichlet or slip: target of the correction
  VertexClassification cls;
  RegionDecomposition dec;
  QuasiInterpolant pi1;
  CorrectionOperator pi2;
  int threads = 1;
};

FortinOperator build_fortin(const Triangulation& mesh, int k, SpaceVariant variant,
                            double singular_tol = kGeneratedMeshTolerance,
                            int threads = 1);

struct OperatorReport {
  double divergence_residual = 0.0;  // vs the full constrained pressure basis
  double projection_residual = 0.0;  // only for discrete inputs
  double trace_residual = 0.0;       // boundary comparison when applicable
  std::vector<double> stability_ratio;  // per triangle, normalized by 1+C_Q(T)
  double build_ms = 0.0;
  double apply_ms = 0.0;
};

struct FortinApplyOptions {
  bool with_divergence_check = false;  // assembles a full pressure basis: small meshes
  bool with_stability_ratios = false;
  const AnalyticField* stability_field = nullptr;  // needed for W^{1,p} ratios
  double p = 2.0;
};

struct FortinResult {
  Eigen::VectorXd nodal;  // coefficients in the unconstrained nodal space
  PiecewisePolynomialField field;
  OperatorReport report;
};

FortinResult apply_fortin(const FortinOperator& F, const FieldExpr& v,
                          const FortinApplyOptions& opts = {});

/// Max relative residual of int div(Pi v - v) q over a pressure basis.
double divergence_pairing_residual(const FortinOperator& F,
                                   const PressureSpaceBasis& Q, const FieldExpr& v,
                                   const PiecewisePolynomialField& piv);

/// Error study over a mesh sequence for || grad^j (v - Pi v) ||_{L^p}.
std::vector<StudyRow> fortin_approximation_study(const AnalyticField& v,
                                                 const std::vector<Triangulation>& meshes,
                                                 int k, SpaceVariant variant, int j,
                                                 double p, int threads = 1);

}  // namespace sv
