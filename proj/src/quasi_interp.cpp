#include "sv/quasi_interp.hpp"

#include <cmath>
#include <map>

#include "sv/quadrature.hpp"

namespace sv {

namespace {

// 1D principal-lattice Lagrange basis on an edge, node j at parameter j/k
// counted from the first endpoint (la = weight of that endpoint).
EdgePoly edge_lagrange(int k, int j) {
  EdgePoly prod(0);
  prod.c[0] = 1.0;
  auto linear = [&](bool on_lb, int r) {
    EdgePoly lin(1);
    lin.c[0] = (on_lb ? double(k) : 0.0) - double(r);
    lin.c[1] = (on_lb ? 0.0 : double(k)) - double(r);
    return lin;
  };
  for (int r = 0; r < j; ++r) {
    prod = prod * linear(true, r);
    for (double& c : prod.c) c /= double(j - r);
  }
  for (int r = 0; r < k - j; ++r) {
    prod = prod * linear(false, r);
    for (double& c : prod.c) c /= double(k - j - r);
  }
  return prod;
}

struct EdgeDualTables {
  std::vector<EdgePoly> basis;     // k+1 functions
  Eigen::MatrixXd mass_inv;        // unit-length edge
  Eigen::VectorXd means;           // int_0^1 basis_j dt
};

EdgeDualTables edge_tables(int k) {
  EdgeDualTables T;
  T.basis.reserve(k + 1);
  for (int j = 0; j <= k; ++j) T.basis.push_back(edge_lagrange(k, j));
  Eigen::MatrixXd M(k + 1, k + 1);
  T.means.resize(k + 1);
  for (int i = 0; i <= k; ++i) {
    T.means[i] = integrate_edge(T.basis[i], 1.0);
    for (int j = 0; j <= k; ++j)
      M(i, j) = integrate_edge(T.basis[i] * T.basis[j], 1.0);
  }
  T.mass_inv = M.inverse();
  return T;
}

// 1-based position of a node along edge e counted from e.v0, or -1
int node_pos_on_edge(const VelocitySpace& V, const Edge& e, int node, int k) {
  if (V.node_kind[node] == NodeKind::Vertex)
    return V.node_parent[node] == e.v0 ? 0 : (V.node_parent[node] == e.v1 ? k : -1);
  if (V.node_kind[node] == NodeKind::Edge) {
    // edge nodes are numbered consecutively from v0
    return -1;  // resolved by the caller from the node id layout
  }
  return -1;
}

}  // namespace

QuasiInterpolant build_quasi_interpolant(const VelocitySpace& V) {
  if (V.k < 2)
    throw InvalidParameter("quasi-interpolant requires k >= 2 (edge nodes)");
  if (V.bc != BoundaryCondition::None)
    throw InvalidParameter("quasi-interpolant acts on the unconstrained space");
  const Triangulation& mesh = *V.mesh;
  QuasiInterpolant op;
  op.V = &V;

  // assignments
  std::vector<std::vector<int>> boundary_edges_at(mesh.n_vertices());
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (mesh.edges[e].boundary) {
      boundary_edges_at[mesh.edges[e].v0].push_back(e);
      boundary_edges_at[mesh.edges[e].v1].push_back(e);
    }

  op.assign.resize(V.n_nodes);
  for (int n = 0; n < V.n_nodes; ++n) {
    QuasiInterpolant::NodeAssignment a;
    if (V.node_boundary[n]) {
      if (V.node_kind[n] == NodeKind::Vertex) {
        const auto& bes = boundary_edges_at[V.node_parent[n]];
        if (V.node_normal_count[n] >= 2) {
          a.kind = QuasiInterpolant::NodeAssignment::Kind::CornerNormalPair;
          a.primary = bes[0];
          a.secondary = bes[1];
        } else {
          a.kind = QuasiInterpolant::NodeAssignment::Kind::EdgeAverage;
          a.primary = *std::min_element(bes.begin(), bes.end());
        }
      } else {  // boundary edge node: its own edge
        a.kind = QuasiInterpolant::NodeAssignment::Kind::EdgeAverage;
        a.primary = V.node_parent[n];
      }
    } else {
      a.kind = QuasiInterpolant::NodeAssignment::Kind::TriangleAverage;
      if (V.node_kind[n] == NodeKind::Interior) {
        a.primary = V.node_parent[n];
      } else if (V.node_kind[n] == NodeKind::Edge) {
        const Edge& e = mesh.edges[V.node_parent[n]];
        a.primary = std::min(e.t0, e.t1 == -1 ? e.t0 : e.t1);
      } else {
        a.primary = *std::min_element(mesh.vertex_tris[V.node_parent[n]].begin(),
                                      mesh.vertex_tris[V.node_parent[n]].end());
      }
    }
    op.assign[n] = a;
  }

  // reference duals
  EdgeDualTables et = edge_tables(V.k);
  op.edge_mass_inv = et.mass_inv;
  const LagrangeBasis& B = lagrange_basis(V.k);
  {
    TriangleGeom ref({0, 0}, {1, 0}, {0, 1});
    Eigen::MatrixXd M(B.size(), B.size());
    for (int i = 0; i < B.size(); ++i)
      for (int j = 0; j < B.size(); ++j)
        M(i, j) = pair_L2(B.phi[i], B.phi[j], ref);
    op.tri_mass_inv = M.inverse();
  }

  // flux-correction data: the central interior node of each edge
  int per_edge = V.k - 1;
  int center_pos = std::max(1, V.k / 2);
  op.edge_center_node.resize(mesh.n_edges());
  op.edge_center_mean.resize(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    op.edge_center_node[e] = mesh.n_vertices() + e * per_edge + (center_pos - 1);
    op.edge_center_mean[e] = et.means[center_pos] * mesh.edges[e].length;
    if (std::abs(et.means[center_pos]) < 1e-6)
      throw InvalidParameter("degenerate flux normalizer for this degree");
  }

  return op;
}

Eigen::VectorXd apply_pi1(const QuasiInterpolant& op, const FieldExpr& v) {
  const VelocitySpace& V = *op.V;
  const Triangulation& mesh = *V.mesh;
  int k = V.k;
  EdgeDualTables et = edge_tables(k);
  const LagrangeBasis& B = lagrange_basis(k);

  // dual value vectors per assigned edge / triangle, computed once
  std::map<int, std::vector<Point2>> edge_vals;  // edge -> k+1 vector values
  std::map<int, std::vector<Point2>> tri_vals;   // tri  -> n_loc vector values
  auto edge_values = [&](int e) -> const std::vector<Point2>& {
    auto it = edge_vals.find(e);
    if (it != edge_vals.end()) return it->second;
    const Edge& ed = mesh.edges[e];
    int from = ed.t0;
    Eigen::MatrixXd m(k + 1, 2);
    for (int j = 0; j <= k; ++j) {
      auto mm = edge_component_moments(mesh, v, e, from, et.basis[j]);
      m(j, 0) = mm[0];
      m(j, 1) = mm[1];
    }
    Eigen::MatrixXd vals = op.edge_mass_inv * m / ed.length;
    std::vector<Point2> out(k + 1);
    for (int j = 0; j <= k; ++j) out[j] = {vals(j, 0), vals(j, 1)};
    return edge_vals.emplace(e, std::move(out)).first->second;
  };
  auto tri_values = [&](int t) -> const std::vector<Point2>& {
    auto it = tri_vals.find(t);
    if (it != tri_vals.end()) return it->second;
    Eigen::MatrixXd m(B.size(), 2);
    for (int i = 0; i < B.size(); ++i) {
      auto mm = triangle_component_moments(mesh, v, t, B.phi[i]);
      m(i, 0) = mm[0];
      m(i, 1) = mm[1];
    }
    // mass on T = 2|T| * reference mass
    Eigen::MatrixXd vals = op.tri_mass_inv * m / (2.0 * mesh.geom[t].area);
    std::vector<Point2> out(B.size());
    for (int i = 0; i < B.size(); ++i) out[i] = {vals(i, 0), vals(i, 1)};
    return tri_vals.emplace(t, std::move(out)).first->second;
  };

  int per_edge = k - 1;
  auto pos_on_edge = [&](int node, int e) {
    if (V.node_kind[node] == NodeKind::Edge && V.node_parent[node] == e)
      return node - (mesh.n_vertices() + e * per_edge) + 1;
    return node_pos_on_edge(V, mesh.edges[e], node, k);
  };

  Eigen::VectorXd nodal = Eigen::VectorXd::Zero(V.nodal_dim());
  for (int n = 0; n < V.n_nodes; ++n) {
    const auto& a = op.assign[n];
    Point2 val{};
    switch (a.kind) {
      case QuasiInterpolant::NodeAssignment::Kind::EdgeAverage: {
        int pos = pos_on_edge(n, a.primary);
        val = edge_values(a.primary)[pos];
        break;
      }
      case QuasiInterpolant::NodeAssignment::Kind::TriangleAverage: {
        int t = a.primary;
        int loc = -1;
        for (int i = 0; i < B.size(); ++i)
          if (V.tri_nodes[t][i] == n) loc = i;
        val = tri_values(t)[loc];
        break;
      }
      case QuasiInterpolant::NodeAssignment::Kind::CornerNormalPair: {
        // normal moments from both boundary edges determine the corner value
        Point2 n1 = mesh.edges[a.primary].normal;
        Point2 n2 = mesh.edges[a.secondary].normal;
        Point2 v1 = edge_values(a.primary)[pos_on_edge(n, a.primary)];
        Point2 v2 = edge_values(a.secondary)[pos_on_edge(n, a.secondary)];
        double d1 = dot(n1, v1), d2 = dot(n2, v2);
        double det = n1.x * n2.y - n1.y * n2.x;
        val = {(d1 * n2.y - d2 * n1.y) / det, (n1.x * d2 - n2.x * d1) / det};
        break;
      }
    }
    nodal[2 * n] = val.x;
    nodal[2 * n + 1] = val.y;
  }

  // flux corrections, decoupled across edges
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    double target = edge_flux(mesh, v, e, ed.t0);
    // flux of the stage-1 field through e from its nodal trace
    double have = 0.0;
    for (int j = 0; j <= k; ++j) {
      int node;
      if (j == 0)
        node = ed.v0;
      else if (j == k)
        node = ed.v1;
      else
        node = mesh.n_vertices() + e * per_edge + (j - 1);
      have += (nodal[2 * node] * ed.normal.x + nodal[2 * node + 1] * ed.normal.y) *
              et.means[j] * ed.length;
    }
    double alpha = (target - have) / op.edge_center_mean[e];
    int cn = op.edge_center_node[e];
    nodal[2 * cn] += alpha * ed.normal.x;
    nodal[2 * cn + 1] += alpha * ed.normal.y;
  }

  return nodal;
}

std::vector<StudyRow> pi1_approximation_report(const AnalyticField& v,
                                               const std::vector<Triangulation>& meshes,
                                               int k, int j, double p) {
  std::vector<StudyRow> rows;
  double prev = 0.0;
  for (int level = 0; level < int(meshes.size()); ++level) {
    const Triangulation& mesh = meshes[level];
    VelocitySpace V = build_velocity_space(mesh, k, BoundaryCondition::None);
    QuasiInterpolant op = build_quasi_interpolant(V);
    Eigen::VectorXd nodal = apply_pi1(op, FieldExpr::of(v));
    PiecewisePolynomialField f = V.nodal_to_field(nodal);
    std::vector<int> all(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) all[t] = t;
    double err = (j == 0) ? error_norm_Lp(mesh, FieldExpr::of(v), f, p, all)
                          : error_gradient_Lp(mesh, FieldExpr::of(v), f, p, all);
    double worst = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      double local = (j == 0)
                         ? error_norm_Lp(mesh, FieldExpr::of(v), f, p, {t})
                         : error_gradient_Lp(mesh, FieldExpr::of(v), f, p, {t});
      worst = std::max(worst, local);
    }
    StudyRow row;
    row.level = level;
    row.h = mesh.h_max;
    row.dofs = V.dim;
    row.error = err;
    row.max_local = worst;
    row.order = (level > 0 && err > 0) ? std::log2(prev / err) : 0.0;
    rows.push_back(row);
    prev = err;
  }
  return rows;
}

}  // namespace sv
