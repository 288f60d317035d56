#include "sv/correction.hpp"

#include <cmath>
#include <map>
#include <set>

#include "sv/util.hpp"

namespace sv {

namespace {

// Moments of v against every local velocity dof field over P(D).
Eigen::VectorXd local_vector_moments(const Triangulation& mesh, const FieldExpr& v,
                                     const VelocitySpace& V,
                                     const LocalVelocitySubspace& sub) {
  const LagrangeBasis& B = lagrange_basis(V.k);
  std::map<int, int> dof_index;
  for (int i = 0; i < int(sub.space_dofs.size()); ++i)
    dof_index[sub.space_dofs[i]] = i;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(sub.space_dofs.size());
  for (int t : sub.p_tris) {
    for (int i = 0; i < B.size(); ++i) {
      int n = V.tri_nodes[t][i];
      bool wanted = false;
      for (int d = 0; d < V.ndirs[n]; ++d)
        wanted |= dof_index.count(V.dof_start[n] + d) > 0;
      if (!wanted) continue;
      auto mm = triangle_component_moments(mesh, v, t, B.phi[i]);
      for (int d = 0; d < V.ndirs[n]; ++d) {
        auto it = dof_index.find(V.dof_start[n] + d);
        if (it == dof_index.end()) continue;
        m[it->second] += V.dirs[n][d].x * mm[0] + V.dirs[n][d].y * mm[1];
      }
    }
  }
  return m;
}

// Moments of div(v) against every pressure monomial over D.
Eigen::VectorXd local_divergence_moments(const Triangulation& mesh,
                                         const FieldExpr& v, int km1,
                                         const LocalVelocitySubspace& sub) {
  int per = TrianglePoly::ncoeffs(km1);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(per * sub.d_tris.size());
  for (int j = 0; j < int(sub.d_tris.size()); ++j) {
    int t = sub.d_tris[j];
    int idx = 0;
    for (int a = km1; a >= 0; --a)
      for (int b = km1 - a; b >= 0; --b) {
        TrianglePoly mono(km1);
        mono.c[idx] = 1.0;
        m[j * per + idx] = pair_divergence(mesh, v, t, mono);
        ++idx;
      }
  }
  return m;
}

// Vector mass matrix over P(D) in local dof coordinates.
Eigen::MatrixXd local_vector_mass(const Triangulation& mesh, const VelocitySpace& V,
                                  const LocalVelocitySubspace& sub) {
  const LagrangeBasis& B = lagrange_basis(V.k);
  TriangleGeom ref({0, 0}, {1, 0}, {0, 1});
  Eigen::MatrixXd ref_mass(B.size(), B.size());
  for (int i = 0; i < B.size(); ++i)
    for (int j = 0; j < B.size(); ++j)
      ref_mass(i, j) = pair_L2(B.phi[i], B.phi[j], ref) / (2.0 * ref.area);
  std::map<int, int> dof_index;
  for (int i = 0; i < int(sub.space_dofs.size()); ++i)
    dof_index[sub.space_dofs[i]] = i;
  int n = int(sub.space_dofs.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int t : sub.p_tris) {
    double scale = 2.0 * mesh.geom[t].area;
    for (int i = 0; i < B.size(); ++i) {
      int ni = V.tri_nodes[t][i];
      for (int di = 0; di < V.ndirs[ni]; ++di) {
        auto ii = dof_index.find(V.dof_start[ni] + di);
        if (ii == dof_index.end()) continue;
        for (int j = 0; j < B.size(); ++j) {
          int nj = V.tri_nodes[t][j];
          for (int dj = 0; dj < V.ndirs[nj]; ++dj) {
            auto jj = dof_index.find(V.dof_start[nj] + dj);
            if (jj == dof_index.end()) continue;
            double dd = dot(V.dirs[ni][di], V.dirs[nj][dj]);
            if (dd != 0.0)
              M(ii->second, jj->second) += dd * scale * ref_mass(i, j);
          }
        }
      }
    }
  }
  return M;
}

// Pressure-monomial mass (block diagonal over the triangles of D).
Eigen::MatrixXd local_pressure_mass(const Triangulation& mesh, int km1,
                                    const LocalVelocitySubspace& sub) {
  int per = TrianglePoly::ncoeffs(km1);
  Eigen::MatrixXd M =
      Eigen::MatrixXd::Zero(per * sub.d_tris.size(), per * sub.d_tris.size());
  for (int j = 0; j < int(sub.d_tris.size()); ++j) {
    const TriangleGeom& g = mesh.geom[sub.d_tris[j]];
    int ia = 0;
    for (int a1 = km1; a1 >= 0; --a1)
      for (int b1 = km1 - a1; b1 >= 0; --b1) {
        int ib = 0;
        for (int a2 = km1; a2 >= 0; --a2)
          for (int b2 = km1 - a2; b2 >= 0; --b2) {
            M(j * per + ia, j * per + ib) = integrate_monomial(
                g, a1 + a2, b1 + b2, (km1 - a1 - b1) + (km1 - a2 - b2));
            ++ib;
          }
        ++ia;
      }
  }
  return M;
}

double region_hD(const Triangulation& mesh, const LocalVelocitySubspace& sub) {
  return triangle_set_diameter(mesh, sub.d_tris);
}

}  // namespace

LocalCorrectionOperator build_local_correction(const VelocitySpace& V,
                                               const LocalVelocitySubspace& sub) {
  const Triangulation& mesh = *V.mesh;
  LocalCorrectionOperator op;
  op.sub = &sub;
  int nQ = sub.dimQ(), n0 = sub.dim0(), nV = sub.dimV();
  op.system.resize(nQ + n0, nV);
  if (nV == 0) return op;
  if (nQ + n0 != nV)
    throw InvalidParameter("correction system is not square: dimQ + dim0 != dimV");

  int km1 = V.k - 1;
  double h = region_hD(mesh, sub);
  // pairing rows scale like h and h^2; normalizing keeps the singular values
  // comparable across refinement levels
  if (nQ > 0) {
    Eigen::MatrixXd Mq = local_pressure_mass(mesh, km1, sub);
    op.system.topRows(nQ) =
        (1.0 / h) * (sub.pressure.transpose() * (Mq * sub.div_on_d_ambient));
  }
  if (n0 > 0) {
    Eigen::MatrixXd Mv = local_vector_mass(mesh, V, sub);
    op.system.bottomRows(n0) =
        (1.0 / (h * h)) * (sub.divfree.transpose() * (Mv * sub.basis));
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(op.system);
  op.sigma_max = svd.singularValues()(0);
  op.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  if (op.sigma_min <= 1e-12 * std::max(1.0, op.sigma_max))
    throw InvalidParameter("correction system numerically singular");
  op.lu.compute(op.system);
  return op;
}

Eigen::VectorXd apply_pi2_local(const VelocitySpace& V,
                                const LocalCorrectionOperator& op,
                                const FieldExpr& v) {
  const Triangulation& mesh = *V.mesh;
  const LocalVelocitySubspace& sub = *op.sub;
  int nQ = sub.dimQ(), n0 = sub.dim0(), nV = sub.dimV();
  if (nV == 0) return Eigen::VectorXd();
  double h = region_hD(mesh, sub);
  Eigen::VectorXd rhs(nQ + n0);
  if (nQ > 0) {
    Eigen::VectorXd dm = local_divergence_moments(mesh, v, V.k - 1, sub);
    rhs.head(nQ) = (1.0 / h) * (sub.pressure.transpose() * dm);
  }
  if (n0 > 0) {
    Eigen::VectorXd vm = local_vector_moments(mesh, v, V, sub);
    rhs.tail(n0) = (1.0 / (h * h)) * (sub.divfree.transpose() * vm);
  }
  return op.lu.solve(rhs);
}

CorrectionOperator build_correction(const VelocitySpace& V,
                                    const VertexClassification& cls,
                                    const RegionDecomposition& dec, int threads) {
  CorrectionOperator op;
  op.V = &V;
  op.dec = &dec;
  int n = int(dec.regions.size());
  op.subspaces.resize(n);
  op.locals.resize(n);
  parallel_for(n, threads, [&](int i) {
    op.subspaces[i] =
        local_velocity_subspace(V, cls, dec.variant, dec.regions[i], i);
    op.locals[i] = build_local_correction(V, op.subspaces[i]);
  });
  return op;
}

Eigen::VectorXd apply_pi2_global(const CorrectionOperator& op, const FieldExpr& v,
                                 int threads) {
  const VelocitySpace& V = *op.V;
  int n = int(op.locals.size());
  std::vector<Eigen::VectorXd> parts(n);
  parallel_for(n, threads,
               [&](int i) { parts[i] = apply_pi2_local(V, op.locals[i], v); });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(V.dim);
  for (int i = 0; i < n; ++i) {  // canonical region order
    if (parts[i].size() == 0) continue;
    Eigen::VectorXd local = op.subspaces[i].basis * parts[i];
    for (int j = 0; j < int(op.subspaces[i].space_dofs.size()); ++j)
      out[op.subspaces[i].space_dofs[j]] += local[j];
  }
  return out;
}

std::array<int, 4> patch_clockwise_order(const Triangulation& mesh,
                                         const Region& region) {
  if (region.kind != RegionKind::InteriorSingularPatch)
    throw InvalidParameter("bubble correction applies to interior singular patches");
  const auto& ccw = mesh.vertex_tris[region.anchor];
  if (ccw.size() != 4)
    throw InvalidParameter("interior singular vertex without 4 triangles");
  std::array<int, 4> cw{ccw[0], ccw[3], ccw[2], ccw[1]};  // reverse orientation
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (cw[i] < cw[best]) best = i;
  std::array<int, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = cw[(best + i) % 4];
  return out;
}

EdgeBubblePsi edge_bubble_psi(const VelocitySpace& V, const Region& region,
                              const std::array<double, 4>& a) {
  const Triangulation& mesh = *V.mesh;
  double scale = std::max({1.0, std::abs(a[0]), std::abs(a[1]), std::abs(a[2]),
                           std::abs(a[3])});
  if (std::abs(a[0] + a[1] + a[2] + a[3]) > 1e-10 * scale)
    throw InvalidParameter("bubble correction needs mean values summing to zero");

  EdgeBubblePsi psi;
  psi.tri_cw = patch_clockwise_order(mesh, region);
  psi.field = PiecewisePolynomialField(mesh, 2, V.k);

  std::array<double, 3> partial{a[0], a[0] + a[1], a[0] + a[1] + a[2]};
  for (int i = 0; i < 3; ++i) {
    if (partial[i] == 0.0) continue;
    int ti = psi.tri_cw[i], tj = psi.tri_cw[(i + 1) % 4];
    int edge = -1;
    for (int e : mesh.tri_edges[ti])
      for (int e2 : mesh.tri_edges[tj])
        if (e == e2) edge = e;
    if (edge < 0) throw InvalidParameter("patch triangles do not share an edge");
    const Edge& ed = mesh.edges[edge];
    double ci = ed.length / 6.0;  // edge mean of the quadratic bubble
    Point2 mid = 0.5 * (mesh.vertices[ed.v0] + mesh.vertices[ed.v1]);
    Point2 centroid = (1.0 / 3.0) * (mesh.geom[ti].p[0] + mesh.geom[ti].p[1] +
                                     mesh.geom[ti].p[2]);
    Point2 n = ed.normal;
    if (dot(n, centroid - mid) > 0) n = -1.0 * n;  // point out of T_i

    for (int t : {ti, tj}) {
      int la = mesh.local_vertex(t, ed.v0), lb = mesh.local_vertex(t, ed.v1);
      TrianglePoly pa(1), pb(1);
      pa.c[TrianglePoly::index(1, la == 0 ? 1 : 0, la == 1 ? 1 : 0)] = 1.0;
      pb.c[TrianglePoly::index(1, lb == 0 ? 1 : 0, lb == 1 ? 1 : 0)] = 1.0;
      TrianglePoly bubble = (pa * pb).raised_to(V.k);
      double w = partial[i] / ci;
      psi.field.poly(t, 0).axpy(w * n.x, bubble);
      psi.field.poly(t, 1).axpy(w * n.y, bubble);
    }
  }

  // nodal interpolation is exact for this continuous piecewise polynomial
  std::set<int> dset(region.triangles.begin(), region.triangles.end());
  Eigen::VectorXd nodal = interpolate_nodal(V, [&](int t, Point2 x) -> Point2 {
    if (!dset.count(t)) {
      for (int tt : dset) {
        auto l = mesh.geom[tt].barycentric(x);
        if (l[0] > -1e-12 && l[1] > -1e-12 && l[2] > -1e-12)
          return {psi.field.eval(tt, l, 0), psi.field.eval(tt, l, 1)};
      }
      return {0.0, 0.0};
    }
    auto l = mesh.geom[t].barycentric(x);
    return {psi.field.eval(t, l, 0), psi.field.eval(t, l, 1)};
  });
  psi.space_coeffs = V.from_nodal(nodal);
  return psi;
}

RightInverseResult right_inverse_divergence(const VelocitySpace& V,
                                            const VertexClassification& cls,
                                            const Region& region,
                                            const LocalVelocitySubspace& sub,
                                            const Eigen::VectorXd& q_local,
                                            double p) {
  (void)cls;
  const Triangulation& mesh = *V.mesh;
  int km1 = V.k - 1;
  int per = TrianglePoly::ncoeffs(km1);
  RightInverseResult out;

  PiecewisePolynomialField qf = sub.pressure_coeffs_to_field(mesh, q_local);
  double q_l2 = qf.norm_L2_on(sub.d_tris);
  {
    auto [qc, qres] = sub.pressure_coords(q_local);
    (void)qc;
    if (qres > 1e-8 * std::max(1.0, q_local.norm()))
      throw InvalidParameter("right inverse: q is not in the local pressure space");
  }

  Eigen::VectorXd space = Eigen::VectorXd::Zero(V.dim);
  Eigen::VectorXd q_rem = q_local;

  if (region.kind == RegionKind::InteriorSingularPatch) {
    out.used_edge_bubble = true;
    auto cw = patch_clockwise_order(mesh, region);
    std::array<double, 4> means{};
    std::map<int, int> block;
    for (int i = 0; i < int(sub.d_tris.size()); ++i) block[sub.d_tris[i]] = i;
    for (int i = 0; i < 4; ++i) {
      int b = block.at(cw[i]);
      TrianglePoly qt(km1);
      for (int m = 0; m < per; ++m) qt.c[m] = q_local[b * per + m];
      means[i] = integrate(qt, mesh.geom[cw[i]]);
    }
    // the means sum to zero up to roundoff since q has zero mean on D
    double s = means[0] + means[1] + means[2] + means[3];
    means[3] -= s;
    EdgeBubblePsi psi = edge_bubble_psi(V, region, means);
    space += psi.space_coeffs;
    for (int i = 0; i < int(sub.d_tris.size()); ++i) {
      int t = sub.d_tris[i];
      TrianglePoly d = divergence(psi.field.poly(t, 0), psi.field.poly(t, 1),
                                  mesh.geom[t]);
      for (int m = 0; m < per; ++m) q_rem[i * per + m] -= d.c[m];
    }
  }

  // minimum-norm coefficient solve of div u = q_rem over the local subspace
  auto [q_coords, rres] = sub.pressure_coords(q_rem);
  (void)rres;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(
      sub.div_in_pressure, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankRelTol);
  Eigen::VectorXd u = svd.solve(q_coords);
  space += sub.to_space(V, u);

  out.space_coeffs = space;

  // exact residual of the divergence against q over D
  PiecewisePolynomialField vf = V.nodal_to_field(V.to_nodal(space));
  double res2 = 0.0;
  for (int i = 0; i < int(sub.d_tris.size()); ++i) {
    int t = sub.d_tris[i];
    TrianglePoly d = divergence(vf.poly(t, 0), vf.poly(t, 1), mesh.geom[t]);
    TrianglePoly qt(km1);
    for (int m = 0; m < per; ++m) qt.c[m] = q_local[i * per + m];
    TrianglePoly diff = d - qt;
    res2 += pair_L2(diff, diff, mesh.geom[t]);
  }
  out.residual = std::sqrt(std::max(0.0, res2)) / std::max(q_l2, 1e-300);

  // support confined to P(D): all coefficients outside it vanish and the
  // divergence vanishes on P(D) \ D
  out.support_ok = true;
  std::set<int> dofs_in(sub.space_dofs.begin(), sub.space_dofs.end());
  for (int i = 0; i < V.dim; ++i)
    if (space[i] != 0.0 && !dofs_in.count(i)) out.support_ok = false;
  for (int t : sub.p_tris) {
    if (std::find(sub.d_tris.begin(), sub.d_tris.end(), t) != sub.d_tris.end())
      continue;
    TrianglePoly d = divergence(vf.poly(t, 0), vf.poly(t, 1), mesh.geom[t]);
    if (d.max_abs_coeff() > 1e-9 * std::max(1.0, vf.max_abs_coeff()))
      out.support_ok = false;
  }

  // measured stability constant
  PiecewisePolynomialField grad(mesh, 4, std::max(V.k - 1, 0));
  for (int t : sub.p_tris) {
    grad.poly(t, 0) = deriv(vf.poly(t, 0), mesh.geom[t], 0);
    grad.poly(t, 1) = deriv(vf.poly(t, 0), mesh.geom[t], 1);
    grad.poly(t, 2) = deriv(vf.poly(t, 1), mesh.geom[t], 0);
    grad.poly(t, 3) = deriv(vf.poly(t, 1), mesh.geom[t], 1);
  }
  double gnorm, qnorm;
  if (p == 2.0) {
    gnorm = grad.norm_L2_on(sub.p_tris);
    qnorm = q_l2;
  } else {
    gnorm = grad.norm_Lp_sampled(p, sub.p_tris);
    qnorm = qf.norm_Lp_sampled(p, sub.d_tris);
  }
  out.measured_constant = qnorm > 0 ? gnorm / qnorm : 0.0;
  return out;
}

}  // namespace sv
