#include "sv/fespaces.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sv {

std::string to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::None: return "none";
    case BoundaryCondition::Dirichlet: return "dirichlet";
    case BoundaryCondition::Slip: return "slip";
  }
  return "?";
}

namespace {

constexpr double kCornerTol = 1e-9;  // |cross(n1,n2)| below this: same normal

}  // namespace

VelocitySpace build_velocity_space(const Triangulation& mesh, int k,
                                   BoundaryCondition bc) {
  if (k < 1) throw InvalidParameter("velocity space requires k >= 1");
  const LagrangeBasis& B = lagrange_basis(k);
  VelocitySpace V;
  V.mesh = &mesh;
  V.k = k;
  V.bc = bc;

  int nv = mesh.n_vertices(), ne = mesh.n_edges(), nt = mesh.n_triangles();
  int per_edge = k - 1;
  int per_tri_interior = (k - 1) * (k - 2) / 2;
  V.n_nodes = nv + ne * per_edge + nt * per_tri_interior;
  V.node_pos.resize(V.n_nodes);
  V.node_kind.resize(V.n_nodes);
  V.node_parent.resize(V.n_nodes);
  V.node_boundary.assign(V.n_nodes, false);

  for (int v = 0; v < nv; ++v) {
    V.node_pos[v] = mesh.vertices[v];
    V.node_kind[v] = NodeKind::Vertex;
    V.node_parent[v] = v;
    V.node_boundary[v] = mesh.boundary_vertex[v];
  }
  for (int e = 0; e < ne; ++e) {
    const Edge& ed = mesh.edges[e];
    for (int j = 1; j <= per_edge; ++j) {
      int id = nv + e * per_edge + (j - 1);
      double t = double(j) / k;
      V.node_pos[id] = mesh.vertices[ed.v0] + t * (mesh.vertices[ed.v1] -
                                                   mesh.vertices[ed.v0]);
      V.node_kind[id] = NodeKind::Edge;
      V.node_parent[id] = e;
      V.node_boundary[id] = ed.boundary;
    }
  }
  int interior_base = nv + ne * per_edge;

  V.tri_nodes.assign(nt, std::vector<int>(B.size(), -1));
  std::vector<int> tri_interior_count(nt, 0);
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < B.size(); ++i) {
      switch (B.kind[i]) {
        case NodeKind::Vertex:
          V.tri_nodes[t][i] = mesh.triangles[t][B.vertex_of[i]];
          break;
        case NodeKind::Edge: {
          int lu = B.edge_of[i][0], lv = B.edge_of[i][1];
          int gu = mesh.triangles[t][lu];
          int opp = 3 - lu - lv;
          int e = mesh.tri_edges[t][opp];
          const Edge& ed = mesh.edges[e];
          // position along the edge counted from its lower-index endpoint
          int pos = (gu == ed.v0) ? B.edge_pos[i] : k - B.edge_pos[i];
          V.tri_nodes[t][i] = nv + e * per_edge + (pos - 1);
          break;
        }
        case NodeKind::Interior: {
          int id = interior_base + t * per_tri_interior + tri_interior_count[t]++;
          V.tri_nodes[t][i] = id;
          V.node_pos[id] = mesh.geom[t].point(B.node_bary(i));
          V.node_kind[id] = NodeKind::Interior;
          V.node_parent[id] = t;
          break;
        }
      }
    }
  }

  // distinct outward boundary normals per node
  V.node_normal_count.assign(V.n_nodes, 0);
  V.node_normals.assign(V.n_nodes, {Point2{}, Point2{}});
  auto add_normal = [&](int node, Point2 n) {
    for (int i = 0; i < V.node_normal_count[node]; ++i)
      if (std::abs(cross(V.node_normals[node][i], n)) < kCornerTol &&
          dot(V.node_normals[node][i], n) > 0)
        return;
    if (V.node_normal_count[node] < 2) V.node_normals[node][V.node_normal_count[node]] = n;
    V.node_normal_count[node]++;
  };
  for (int e = 0; e < ne; ++e) {
    const Edge& ed = mesh.edges[e];
    if (!ed.boundary) continue;
    add_normal(ed.v0, ed.normal);
    add_normal(ed.v1, ed.normal);
    for (int j = 1; j <= per_edge; ++j) add_normal(nv + e * per_edge + (j - 1), ed.normal);
  }

  V.ndirs.assign(V.n_nodes, 0);
  V.dirs.assign(V.n_nodes, {Point2{1, 0}, Point2{0, 1}});
  for (int n = 0; n < V.n_nodes; ++n) {
    if (!V.node_boundary[n]) {
      V.ndirs[n] = 2;
      continue;
    }
    switch (bc) {
      case BoundaryCondition::None:
        V.ndirs[n] = 2;
        break;
      case BoundaryCondition::Dirichlet:
        V.ndirs[n] = 0;
        break;
      case BoundaryCondition::Slip:
        if (V.node_normal_count[n] >= 2) {
          V.ndirs[n] = 0;  // corner: both normal constraints pin the node
        } else {
          Point2 nn = V.node_normals[n][0];
          V.ndirs[n] = 1;
          V.dirs[n][0] = {-nn.y, nn.x};
        }
        break;
    }
  }
  V.dof_start.resize(V.n_nodes + 1);
  V.dof_start[0] = 0;
  for (int n = 0; n < V.n_nodes; ++n) V.dof_start[n + 1] = V.dof_start[n] + V.ndirs[n];
  V.dim = V.dof_start[V.n_nodes];
  return V;
}

Eigen::VectorXd VelocitySpace::to_nodal(const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nodal_dim());
  for (int n = 0; n < n_nodes; ++n)
    for (int d = 0; d < ndirs[n]; ++d) {
      double c = coeffs[dof_start[n] + d];
      out[2 * n] += c * dirs[n][d].x;
      out[2 * n + 1] += c * dirs[n][d].y;
    }
  return out;
}

Eigen::VectorXd VelocitySpace::from_nodal(const Eigen::VectorXd& nodal) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  for (int n = 0; n < n_nodes; ++n)
    for (int d = 0; d < ndirs[n]; ++d)
      out[dof_start[n] + d] =
          nodal[2 * n] * dirs[n][d].x + nodal[2 * n + 1] * dirs[n][d].y;
  return out;
}

PiecewisePolynomialField VelocitySpace::nodal_to_field(
    const Eigen::VectorXd& nodal) const {
  const LagrangeBasis& B = lagrange_basis(k);
  PiecewisePolynomialField f(*mesh, 2, k);
  for (int t = 0; t < mesh->n_triangles(); ++t)
    for (int i = 0; i < B.size(); ++i) {
      int n = tri_nodes[t][i];
      if (nodal[2 * n] != 0.0) f.poly(t, 0).axpy(nodal[2 * n], B.phi[i]);
      if (nodal[2 * n + 1] != 0.0) f.poly(t, 1).axpy(nodal[2 * n + 1], B.phi[i]);
    }
  return f;
}

Eigen::VectorXd VelocitySpace::field_to_nodal(const PiecewisePolynomialField& f) const {
  const LagrangeBasis& B = lagrange_basis(k);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nodal_dim());
  std::vector<bool> done(n_nodes, false);
  for (int t = 0; t < mesh->n_triangles(); ++t)
    for (int i = 0; i < B.size(); ++i) {
      int n = tri_nodes[t][i];
      if (done[n]) continue;
      done[n] = true;
      auto l = B.node_bary(i);
      out[2 * n] = f.eval(t, l, 0);
      out[2 * n + 1] = f.eval(t, l, 1);
    }
  return out;
}

Eigen::VectorXd interpolate_nodal(
    const VelocitySpace& V, const std::function<Point2(int, Point2)>& f) {
  const LagrangeBasis& B = lagrange_basis(V.k);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(V.nodal_dim());
  std::vector<bool> done(V.n_nodes, false);
  for (int t = 0; t < V.mesh->n_triangles(); ++t)
    for (int i = 0; i < B.size(); ++i) {
      int n = V.tri_nodes[t][i];
      if (done[n]) continue;
      done[n] = true;
      Point2 val = f(t, V.node_pos[n]);
      out[2 * n] = val.x;
      out[2 * n + 1] = val.y;
    }
  return out;
}

double alternating_vertex_functional(const Triangulation& mesh,
                                     const PiecewisePolynomialField& q, int z) {
  const auto& tris = mesh.vertex_tris[z];
  int L = int(tris.size());
  double sum = 0.0;
  for (int j = 1; j <= L; ++j) {
    int t = tris[j - 1];
    int lv = mesh.local_vertex(t, z);
    std::array<double, 3> l{0, 0, 0};
    l[lv] = 1.0;
    double sign = ((L - j) % 2 == 0) ? 1.0 : -1.0;
    sum += sign * q.eval(t, l, 0);
  }
  return sum;
}

namespace {

// column index of the coefficient that carries the value at local vertex lv
// (the pure lambda_lv^km1 monomial)
int vertex_value_coeff(int km1, int lv) {
  switch (lv) {
    case 0: return TrianglePoly::index(km1, km1, 0);
    case 1: return TrianglePoly::index(km1, 0, km1);
    default: return TrianglePoly::index(km1, 0, 0);
  }
}

// alternating-functional row over the pressure ambient, restricted to a
// triangle subset (signs keep their global cyclic positions)
using RowRef = Eigen::Block<Eigen::MatrixXd, 1, Eigen::Dynamic, false>;

void add_ahz_row(const Triangulation& mesh, int z, int km1,
                 const std::vector<int>& allowed_tris, int per_tri,
                 const std::function<int(int)>& tri_block, RowRef row) {
  const auto& tris = mesh.vertex_tris[z];
  int L = int(tris.size());
  std::set<int> allowed(allowed_tris.begin(), allowed_tris.end());
  for (int j = 1; j <= L; ++j) {
    int t = tris[j - 1];
    if (!allowed.count(t)) continue;
    int block = tri_block(t);
    if (block < 0) continue;
    double sign = ((L - j) % 2 == 0) ? 1.0 : -1.0;
    row[block * per_tri + vertex_value_coeff(km1, mesh.local_vertex(t, z))] += sign;
  }
}

void add_mean_row(const Triangulation& mesh, int km1,
                  const std::vector<int>& tris, int per_tri,
                  const std::function<int(int)>& tri_block, RowRef row) {
  for (int t : tris) {
    int block = tri_block(t);
    int i = 0;
    for (int a = km1; a >= 0; --a)
      for (int b = km1 - a; b >= 0; --b)
        row[block * per_tri + i++] += integrate_monomial(mesh.geom[t], a, b, km1 - a - b);
  }
}

PressureSpaceBasis finish_pressure_space(const Triangulation& mesh, int km1,
                                         SpaceVariant variant,
                                         std::vector<int> constrained,
                                         Eigen::MatrixXd C) {
  PressureSpaceBasis P;
  P.mesh = &mesh;
  P.km1 = km1;
  P.variant = variant;
  P.constrained_vertices = std::move(constrained);
  P.basis = orthonormal_nullspace(C);
  P.rank = int(C.cols() - P.basis.cols());
  P.constraints = std::move(C);
  return P;
}

}  // namespace

std::vector<int> constrained_vertices_in(const Triangulation& mesh,
                                         const VertexClassification& cls,
                                         SpaceVariant variant,
                                         const std::vector<int>& tris) {
  std::set<int> verts;
  for (int t : tris)
    for (int v : mesh.triangles[t]) verts.insert(v);
  std::vector<int> out;
  for (int v : verts) {
    if (cls.cls[v] == VertexClass::InteriorSingular ||
        (variant == SpaceVariant::Dirichlet &&
         cls.cls[v] == VertexClass::BoundarySingular))
      out.push_back(v);
  }
  return out;
}

PressureSpaceBasis build_pressure_space(const Triangulation& mesh, int km1,
                                        const VertexClassification& cls,
                                        SpaceVariant variant) {
  PressureAmbient amb = pressure_ambient(mesh, km1);
  std::vector<int> all_tris(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) all_tris[t] = t;
  std::vector<int> constrained =
      constrained_vertices_in(mesh, cls, variant, all_tris);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1 + int(constrained.size()), amb.dim);
  auto ident = [](int t) { return t; };
  add_mean_row(mesh, km1, all_tris, amb.per_tri, ident, C.row(0));
  for (int i = 0; i < int(constrained.size()); ++i)
    add_ahz_row(mesh, constrained[i], km1, all_tris, amb.per_tri, ident, C.row(1 + i));
  return finish_pressure_space(mesh, km1, variant, std::move(constrained), std::move(C));
}

PressureSpaceBasis build_pressure_space_region_mean_free(
    const Triangulation& mesh, int km1, const VertexClassification& cls,
    const RegionDecomposition& dec) {
  PressureAmbient amb = pressure_ambient(mesh, km1);
  std::vector<int> all_tris(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) all_tris[t] = t;
  std::vector<int> constrained =
      constrained_vertices_in(mesh, cls, dec.variant, all_tris);
  // one mean row per region (their sum spans the global mean row)
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(
      int(dec.regions.size()) + int(constrained.size()), amb.dim);
  auto ident = [](int t) { return t; };
  for (int r = 0; r < int(dec.regions.size()); ++r)
    add_mean_row(mesh, km1, dec.regions[r].triangles, amb.per_tri, ident, C.row(r));
  for (int i = 0; i < int(constrained.size()); ++i)
    add_ahz_row(mesh, constrained[i], km1, all_tris, amb.per_tri, ident,
                C.row(int(dec.regions.size()) + i));
  return finish_pressure_space(mesh, km1, dec.variant, std::move(constrained),
                               std::move(C));
}

PressureSpaceBasis build_pressure_space_triangle_mean_free(
    const Triangulation& mesh, int km1, const VertexClassification& cls,
    SpaceVariant variant) {
  PressureAmbient amb = pressure_ambient(mesh, km1);
  std::vector<int> all_tris(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) all_tris[t] = t;
  std::vector<int> constrained =
      constrained_vertices_in(mesh, cls, variant, all_tris);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(
      mesh.n_triangles() + int(constrained.size()), amb.dim);
  auto ident = [](int t) { return t; };
  for (int t = 0; t < mesh.n_triangles(); ++t)
    add_mean_row(mesh, km1, {t}, amb.per_tri, ident, C.row(t));
  for (int i = 0; i < int(constrained.size()); ++i)
    add_ahz_row(mesh, constrained[i], km1, all_tris, amb.per_tri, ident,
                C.row(mesh.n_triangles() + i));
  return finish_pressure_space(mesh, km1, variant, std::move(constrained),
                               std::move(C));
}

PiecewisePolynomialField PressureSpaceBasis::element_field(int i) const {
  return coeffs_to_field(basis.col(i));
}

PiecewisePolynomialField PressureSpaceBasis::coeffs_to_field(
    const Eigen::VectorXd& ambient) const {
  int per = TrianglePoly::ncoeffs(km1);
  PiecewisePolynomialField f(*mesh, 1, km1);
  for (int t = 0; t < mesh->n_triangles(); ++t)
    for (int j = 0; j < per; ++j) f.poly(t, 0).c[j] = ambient[t * per + j];
  return f;
}

Eigen::SparseMatrix<double> divergence_matrix(const VelocitySpace& V) {
  const Triangulation& mesh = *V.mesh;
  const LagrangeBasis& B = lagrange_basis(V.k);
  int km1 = V.k - 1;
  int per = TrianglePoly::ncoeffs(km1);
  std::vector<Eigen::Triplet<double>> trips;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const TriangleGeom& g = mesh.geom[t];
    for (int i = 0; i < B.size(); ++i) {
      int n = V.tri_nodes[t][i];
      // divergence of phi_i * e_c
      for (int c = 0; c < 2; ++c) {
        TrianglePoly d(km1);
        for (int j = 0; j < 3; ++j) {
          double gj = (c == 0) ? g.grad_lambda[j].x : g.grad_lambda[j].y;
          if (gj != 0.0) d.axpy(gj, B.dphi[i][j]);
        }
        for (int m = 0; m < per; ++m)
          if (d.c[m] != 0.0) trips.emplace_back(t * per + m, 2 * n + c, d.c[m]);
      }
    }
  }
  Eigen::SparseMatrix<double> Bmat(per * mesh.n_triangles(), V.nodal_dim());
  Bmat.setFromTriplets(trips.begin(), trips.end());
  return Bmat;
}

Eigen::MatrixXd divergence_matrix_on_space(const VelocitySpace& V) {
  Eigen::SparseMatrix<double> Bn = divergence_matrix(V);
  Eigen::MatrixXd out(Bn.rows(), V.dim);
  for (int n = 0; n < V.n_nodes; ++n)
    for (int d = 0; d < V.ndirs[n]; ++d) {
      Eigen::VectorXd col = V.dirs[n][d].x * Eigen::VectorXd(Bn.col(2 * n)) +
                            V.dirs[n][d].y * Eigen::VectorXd(Bn.col(2 * n + 1));
      out.col(V.dof_start[n] + d) = col;
    }
  return out;
}

PiecewisePolynomialField LocalVelocitySubspace::pressure_field(
    const Triangulation& mesh, int i) const {
  return pressure_coeffs_to_field(mesh, pressure.col(i));
}

PiecewisePolynomialField LocalVelocitySubspace::pressure_coeffs_to_field(
    const Triangulation& mesh, const Eigen::VectorXd& c) const {
  int per = int(pressure.rows()) / std::max(1, int(d_tris.size()));
  int km1 = 0;
  while (TrianglePoly::ncoeffs(km1) != per) ++km1;
  PiecewisePolynomialField f(mesh, 1, km1);
  for (int j = 0; j < int(d_tris.size()); ++j)
    for (int m = 0; m < per; ++m) f.poly(d_tris[j], 0).c[m] = c[j * per + m];
  return f;
}

Eigen::VectorXd LocalVelocitySubspace::to_space(const VelocitySpace& V,
                                                const Eigen::VectorXd& c) const {
  Eigen::VectorXd local = basis * c;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(V.dim);
  for (int i = 0; i < int(space_dofs.size()); ++i) out[space_dofs[i]] = local[i];
  return out;
}

std::pair<Eigen::VectorXd, double> LocalVelocitySubspace::pressure_coords(
    const Eigen::VectorXd& local_amb) const {
  Eigen::VectorXd coords = pressure.transpose() * local_amb;
  double res = (local_amb - pressure * coords).norm();
  return {coords, res};
}

LocalVelocitySubspace local_velocity_subspace(const VelocitySpace& V,
                                              const VertexClassification& cls,
                                              SpaceVariant variant,
                                              const Region& region, int region_id) {
  const Triangulation& mesh = *V.mesh;
  const LagrangeBasis& B = lagrange_basis(V.k);
  int km1 = V.k - 1;
  int per = TrianglePoly::ncoeffs(km1);

  LocalVelocitySubspace S;
  S.region = region_id;
  S.d_tris = region.triangles;
  S.p_tris = region.patch_triangles;

  std::set<int> pset(S.p_tris.begin(), S.p_tris.end());
  std::set<int> dset(S.d_tris.begin(), S.d_tris.end());

  // nodes whose every incident triangle lies in P(D); their basis functions
  // are supported in P(D) and vanish on the interior part of its boundary
  auto node_inside = [&](int n) {
    switch (V.node_kind[n]) {
      case NodeKind::Vertex: {
        for (int t : mesh.vertex_tris[V.node_parent[n]])
          if (!pset.count(t)) return false;
        return true;
      }
      case NodeKind::Edge: {
        const Edge& e = mesh.edges[V.node_parent[n]];
        if (!pset.count(e.t0)) return false;
        if (e.t1 != -1 && !pset.count(e.t1)) return false;
        return true;
      }
      case NodeKind::Interior:
        return pset.count(V.node_parent[n]) > 0;
    }
    return false;
  };
  std::set<int> nodes;
  for (int t : S.p_tris)
    for (int n : V.tri_nodes[t])
      if (node_inside(n)) nodes.insert(n);
  std::vector<int> node_list(nodes.begin(), nodes.end());
  for (int n : node_list)
    for (int d = 0; d < V.ndirs[n]; ++d) S.space_dofs.push_back(V.dof_start[n] + d);
  int ndof = int(S.space_dofs.size());

  // local divergence blocks per patch triangle (per x ndof each)
  std::map<int, int> dof_index;
  for (int i = 0; i < ndof; ++i) dof_index[S.space_dofs[i]] = i;
  std::map<int, Eigen::MatrixXd> div_block;
  for (int t : S.p_tris) {
    Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(per, ndof);
    const TriangleGeom& g = mesh.geom[t];
    for (int i = 0; i < B.size(); ++i) {
      int n = V.tri_nodes[t][i];
      if (!nodes.count(n)) continue;
      for (int d = 0; d < V.ndirs[n]; ++d) {
        auto it = dof_index.find(V.dof_start[n] + d);
        Point2 dir = V.dirs[n][d];
        TrianglePoly dv(km1);
        for (int j = 0; j < 3; ++j) {
          double gj = dir.x * g.grad_lambda[j].x + dir.y * g.grad_lambda[j].y;
          if (gj != 0.0) dv.axpy(gj, B.dphi[i][j]);
        }
        for (int m = 0; m < per; ++m) blk(m, it->second) += dv.c[m];
      }
    }
    div_block.emplace(t, std::move(blk));
  }

  // constraints: divergence vanishes on P(D) \ D; alternating functional of
  // the divergence vanishes at the constrained singular vertices of D
  std::vector<int> constrained = constrained_vertices_in(mesh, cls, variant, S.d_tris);
  int n_outside = int(S.p_tris.size()) - int(S.d_tris.size());
  Eigen::MatrixXd C =
      Eigen::MatrixXd::Zero(n_outside * per + int(constrained.size()), ndof);
  int row = 0;
  for (int t : S.p_tris) {
    if (dset.count(t)) continue;
    C.middleRows(row, per) = div_block[t];
    row += per;
  }
  for (int z : constrained) {
    const auto& tris = mesh.vertex_tris[z];
    int L = int(tris.size());
    for (int j = 1; j <= L; ++j) {
      int t = tris[j - 1];
      if (!dset.count(t)) continue;  // divergence already forced to zero there
      double sign = ((L - j) % 2 == 0) ? 1.0 : -1.0;
      int coeff = vertex_value_coeff(km1, mesh.local_vertex(t, z));
      C.row(row) += sign * div_block[t].row(coeff);
    }
    ++row;
  }
  S.basis = orthonormal_nullspace(C);

  // local pressure space over D
  int amb = per * int(S.d_tris.size());
  Eigen::MatrixXd PC = Eigen::MatrixXd::Zero(1 + int(constrained.size()), amb);
  std::map<int, int> d_block;
  for (int i = 0; i < int(S.d_tris.size()); ++i) d_block[S.d_tris[i]] = i;
  auto blk_of = [&](int t) {
    auto it = d_block.find(t);
    return it == d_block.end() ? -1 : it->second;
  };
  add_mean_row(mesh, km1, S.d_tris, per, blk_of, PC.row(0));
  for (int i = 0; i < int(constrained.size()); ++i)
    add_ahz_row(mesh, constrained[i], km1, S.d_tris, per, blk_of, PC.row(1 + i));
  S.pressure = orthonormal_nullspace(PC);

  // divergence of the subspace in local pressure coordinates, with the
  // range-inclusion residual
  Eigen::MatrixXd div_on_D(amb, S.basis.cols());
  for (int i = 0; i < int(S.d_tris.size()); ++i)
    div_on_D.middleRows(i * per, per) = div_block[S.d_tris[i]] * S.basis;
  S.div_in_pressure = S.pressure.transpose() * div_on_D;
  Eigen::MatrixXd resid = div_on_D - S.pressure * S.div_in_pressure;
  double scale = std::max(1.0, div_on_D.norm());
  S.inclusion_residual = resid.norm() / scale;
  S.div_rank = numerical_rank(S.div_in_pressure);
  S.divfree = S.basis * orthonormal_nullspace(S.div_in_pressure);
  S.div_on_d_ambient = std::move(div_on_D);
  return S;
}

}  // namespace sv
