#include "sv/fortin.hpp"

#include <chrono>
#include <cmath>

namespace sv {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

}  // namespace

FortinOperator build_fortin(const Triangulation& mesh, int k, SpaceVariant variant,
                            double singular_tol, int threads) {
  FortinOperator F;
  F.variant = variant;
  F.mesh = &mesh;
  F.threads = threads;
  F.full = build_velocity_space(mesh, k, BoundaryCondition::None);
  F.constrained = build_velocity_space(mesh, k, bc_of(variant));
  F.cls = classify_vertices(mesh, singular_tol);
  F.dec = build_decomposition(mesh, F.cls, variant);
  F.pi1 = build_quasi_interpolant(F.full);
  F.pi2 = build_correction(F.constrained, F.cls, F.dec, threads);
  return F;
}

FortinResult apply_fortin(const FortinOperator& F, const FieldExpr& v,
                          const FortinApplyOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  FortinResult out;

  // interpolation stage
  Eigen::VectorXd u1 = apply_pi1(F.pi1, v);
  PiecewisePolynomialField f1 = F.full.nodal_to_field(u1);

  // correction of the defect v - u1
  FieldExpr defect = v;
  defect.add(f1, -1.0);
  Eigen::VectorXd u2 = apply_pi2_global(F.pi2, defect, F.threads);
  Eigen::VectorXd nodal = u1 + F.constrained.to_nodal(u2);

  out.nodal = std::move(nodal);
  out.field = F.full.nodal_to_field(out.nodal);
  out.report.apply_ms = ms_since(t0);

  if (v.terms.size() == 1 && v.terms[0].discrete && v.terms[0].coeff == 1.0) {
    Eigen::VectorXd in = F.full.field_to_nodal(*v.terms[0].discrete);
    double scale = std::max(1.0, in.lpNorm<Eigen::Infinity>());
    out.report.projection_residual =
        (out.nodal - in).lpNorm<Eigen::Infinity>() / scale;
    double tr = 0.0;
    for (int n = 0; n < F.full.n_nodes; ++n) {
      if (!F.full.node_boundary[n]) continue;
      tr = std::max(tr, std::abs(out.nodal[2 * n] - in[2 * n]));
      tr = std::max(tr, std::abs(out.nodal[2 * n + 1] - in[2 * n + 1]));
    }
    out.report.trace_residual = tr / scale;
  }

  if (opts.with_divergence_check) {
    PressureSpaceBasis Q =
        build_pressure_space(*F.mesh, F.full.k - 1, F.cls, F.variant);
    out.report.divergence_residual =
        divergence_pairing_residual(F, Q, v, out.field);
  }
  if (opts.with_stability_ratios && opts.stability_field) {
    const Triangulation& mesh = *F.mesh;
    out.report.stability_ratio.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      auto cs = covering_sets(mesh, F.dec, t);
      double theta_q = theta_of(mesh, F.cls, cs.union_patch);
      double cq = 1.0 + (std::isinf(theta_q) ? 0.0 : 1.0 / theta_q);
      PiecewisePolynomialField grad(mesh, 4, std::max(F.full.k - 1, 0));
      grad.poly(t, 0) = deriv(out.field.poly(t, 0), mesh.geom[t], 0);
      grad.poly(t, 1) = deriv(out.field.poly(t, 0), mesh.geom[t], 1);
      grad.poly(t, 2) = deriv(out.field.poly(t, 1), mesh.geom[t], 0);
      grad.poly(t, 3) = deriv(out.field.poly(t, 1), mesh.geom[t], 1);
      double num = opts.p == 2.0 ? grad.norm_L2_on({t})
                                 : grad.norm_Lp_sampled(opts.p, {t});
      double den = analytic_W1p_norm(mesh, *opts.stability_field, opts.p,
                                     cs.patch_of_union);
      out.report.stability_ratio[t] =
          den > 0 ? num / ((1.0 + cq) * den) : 0.0;
    }
  }
  return out;
}

double divergence_pairing_residual(const FortinOperator& F,
                                   const PressureSpaceBasis& Q, const FieldExpr& v,
                                   const PiecewisePolynomialField& piv) {
  const Triangulation& mesh = *F.mesh;
  PiecewisePolynomialField div_piv = piv.divergence_field();

  // residuals are reported relative to the pairing scale of the input
  double div_scale = std::max(1.0, expr_divergence_L2(mesh, v));

  double worst = 0.0;
  for (int i = 0; i < Q.dim(); ++i) {
    PiecewisePolynomialField q = Q.element_field(i);
    double lhs = 0.0, rhs = 0.0, qnorm2 = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      lhs += pair_L2(div_piv.poly(t, 0), q.poly(t, 0), mesh.geom[t]);
      rhs += pair_divergence(mesh, v, t, q.poly(t, 0));
      qnorm2 += pair_L2(q.poly(t, 0), q.poly(t, 0), mesh.geom[t]);
    }
    double qn = std::sqrt(std::max(qnorm2, 1e-300));
    worst = std::max(worst, std::abs(lhs - rhs) / (qn * div_scale));
  }
  return worst;
}

std::vector<StudyRow> fortin_approximation_study(const AnalyticField& v,
                                                 const std::vector<Triangulation>& meshes,
                                                 int k, SpaceVariant variant, int j,
                                                 double p, int threads) {
  std::vector<StudyRow> rows;
  double prev = 0.0;
  for (int level = 0; level < int(meshes.size()); ++level) {
    const Triangulation& mesh = meshes[level];
    FortinOperator F =
        build_fortin(mesh, k, variant, kGeneratedMeshTolerance, threads);
    FortinResult r = apply_fortin(F, FieldExpr::of(v));
    std::vector<int> all(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) all[t] = t;
    double err = (j == 0) ? error_norm_Lp(mesh, FieldExpr::of(v), r.field, p, all)
                          : error_gradient_Lp(mesh, FieldExpr::of(v), r.field, p, all);
    double worst = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      double local =
          (j == 0) ? error_norm_Lp(mesh, FieldExpr::of(v), r.field, p, {t})
                   : error_gradient_Lp(mesh, FieldExpr::of(v), r.field, p, {t});
      worst = std::max(worst, local);
    }
    StudyRow row;
    row.level = level;
    row.h = mesh.h_max;
    row.dofs = F.full.dim;
    row.error = err;
    row.max_local = worst;
    row.order = (level > 0 && err > 0) ? std::log2(prev / err) : 0.0;
    rows.push_back(row);
    prev = err;
  }
  return rows;
}

}  // namespace sv
