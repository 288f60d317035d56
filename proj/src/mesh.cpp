#include "sv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sv {

double Triangulation::angle_at(int t, int v) const {
  int i = local_vertex(t, v);
  Point2 a = vertices[triangles[t][(i + 1) % 3]] - vertices[v];
  Point2 b = vertices[triangles[t][(i + 2) % 3]] - vertices[v];
  return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

namespace {

// ccw walk around z: from triangle t (with z at local index i, triangle
// (z, u, w) ccw) the successor shares the edge (z, w), i.e. the edge opposite
// u.
int ccw_successor(const Triangulation& m, int t, int z) {
  int i = m.local_vertex(t, z);
  int u_local = (i + 1) % 3;
  return m.neighbors[t][u_local];
}
int ccw_predecessor(const Triangulation& m, int t, int z) {
  int i = m.local_vertex(t, z);
  int w_local = (i + 2) % 3;
  return m.neighbors[t][w_local];
}

void build_vertex_orders(Triangulation& m) {
  int nv = m.n_vertices();
  std::vector<std::vector<int>> incident(nv);
  for (int t = 0; t < m.n_triangles(); ++t)
    for (int v : m.triangles[t]) incident[v].push_back(t);

  m.vertex_tris.assign(nv, {});
  for (int z = 0; z < nv; ++z) {
    auto& inc = incident[z];
    if (inc.empty()) throw TopologyError("isolated vertex " + std::to_string(z));
    std::sort(inc.begin(), inc.end());
    int start = inc[0];
    if (m.boundary_vertex[z]) {
      // start at the triangle whose clockwise-most edge at z is a boundary edge
      start = -1;
      for (int t : inc)
        if (ccw_predecessor(m, t, z) == -1) {
          if (start != -1)
            throw TopologyError("vertex " + std::to_string(z) +
                                ": patch is not edge-connected");
          start = t;
        }
      if (start == -1)
        throw TopologyError("vertex " + std::to_string(z) + ": no boundary start");
    }
    std::vector<int> order;
    int t = start;
    for (size_t step = 0; step < inc.size(); ++step) {
      order.push_back(t);
      t = ccw_successor(m, t, z);
      if (t == -1) break;
      if (t == start) break;
    }
    if (order.size() != inc.size())
      throw TopologyError("vertex " + std::to_string(z) +
                          ": patch is not edge-connected");
    if (!m.boundary_vertex[z] && ccw_successor(m, order.back(), z) != start)
      throw TopologyError("vertex " + std::to_string(z) + ": patch does not close");
    m.vertex_tris[z] = std::move(order);
  }
}

}  // namespace

Triangulation build_triangulation(std::vector<Point2> vertices,
                                  std::vector<std::array<int, 3>> triangles) {
  Triangulation m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  int nv = m.n_vertices(), nt = m.n_triangles();
  if (nt == 0) throw TopologyError("mesh has no triangles");

  {
    std::map<std::pair<double, double>, int> seen;
    for (int v = 0; v < nv; ++v) {
      if (!std::isfinite(m.vertices[v].x) || !std::isfinite(m.vertices[v].y))
        throw ParseError("non-finite vertex coordinate");
      auto key = std::make_pair(m.vertices[v].x, m.vertices[v].y);
      auto [it, inserted] = seen.emplace(key, v);
      if (!inserted)
        throw TopologyError("duplicate vertex: " + std::to_string(it->second) +
                            " and " + std::to_string(v));
    }
  }

  for (auto& tri : m.triangles) {
    for (int v : tri)
      if (v < 0 || v >= nv) throw TopologyError("triangle vertex index out of range");
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw TopologyError("triangle with repeated vertex");
    double a = 0.5 * cross(m.vertices[tri[1]] - m.vertices[tri[0]],
                           m.vertices[tri[2]] - m.vertices[tri[0]]);
    if (a < 0) std::swap(tri[1], tri[2]);  // normalize to ccw
    a = std::abs(a);
    if (!(a > 0.0)) throw TopologyError("degenerate triangle (zero area)");
  }

  // edge table
  std::map<std::pair<int, int>, int> edge_id;
  m.tri_edges.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) {
      int a = m.triangles[t][(i + 1) % 3], b = m.triangles[t][(i + 2) % 3];
      auto key = std::minmax(a, b);
      auto it = edge_id.find(key);
      if (it == edge_id.end()) {
        Edge e;
        e.v0 = key.first;
        e.v1 = key.second;
        e.t0 = t;
        it = edge_id.emplace(key, int(m.edges.size())).first;
        m.edges.push_back(e);
      } else {
        Edge& e = m.edges[it->second];
        if (e.t1 != -1)
          throw TopologyError("edge (" + std::to_string(key.first) + "," +
                              std::to_string(key.second) +
                              ") shared by more than two triangles");
        e.t1 = t;
      }
      m.tri_edges[t][i] = it->second;
    }
  }
  m.boundary_vertex.assign(nv, false);
  for (Edge& e : m.edges) {
    e.boundary = (e.t1 == -1);
    Point2 d = m.vertices[e.v1] - m.vertices[e.v0];
    e.length = norm(d);
    e.normal = {d.y / e.length, -d.x / e.length};
    if (e.boundary) {
      m.boundary_vertex[e.v0] = m.boundary_vertex[e.v1] = true;
      // flip to point out of the adjacent triangle
      int t = e.t0;
      int opp = -1;
      for (int i = 0; i < 3; ++i)
        if (m.tri_edges[t][i] == int(&e - m.edges.data())) opp = i;
      Point2 inward = m.vertices[m.triangles[t][opp]] - m.vertices[e.v0];
      if (dot(e.normal, inward) > 0) e.normal = -1.0 * e.normal;
    }
  }

  m.neighbors.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i) {
      const Edge& e = m.edges[m.tri_edges[t][i]];
      m.neighbors[t][i] = (e.t0 == t) ? e.t1 : e.t0;
    }

  m.geom.reserve(nt);
  m.h_max = 0.0;
  for (int t = 0; t < nt; ++t) {
    m.geom.emplace_back(m.vertices[m.triangles[t][0]], m.vertices[m.triangles[t][1]],
                        m.vertices[m.triangles[t][2]]);
    m.h_max = std::max(m.h_max, m.geom[t].diameter);
  }

  build_vertex_orders(m);
  return m;
}

Triangulation load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file: " + path);
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Point2 p;
      if (!(ls >> p.x >> p.y))
        throw ParseError(path + ":" + std::to_string(lineno) + ": malformed vertex");
      vertices.push_back(p);
    } else if (tag == "t") {
      std::array<int, 3> t{};
      if (!(ls >> t[0] >> t[1] >> t[2]))
        throw ParseError(path + ":" + std::to_string(lineno) + ": malformed triangle");
      triangles.push_back(t);
    } else {
      throw ParseError(path + ":" + std::to_string(lineno) + ": unknown record '" +
                       tag + "'");
    }
  }
  return build_triangulation(std::move(vertices), std::move(triangles));
}

void save_mesh(const Triangulation& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  char buf[80];
  for (const Point2& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", p.x, p.y);
    out << buf;
  }
  for (const auto& t : mesh.triangles)
    out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

MeshKind mesh_kind_from_string(const std::string& s) {
  if (s == "diagonal") return MeshKind::Diagonal;
  if (s == "crisscross") return MeshKind::Crisscross;
  if (s == "perturbed_crisscross") return MeshKind::PerturbedCrisscross;
  if (s == "boundary_chain") return MeshKind::BoundaryChain;
  throw InvalidParameter("unknown mesh kind: " + s);
}

std::string to_string(MeshKind k) {
  switch (k) {
    case MeshKind::Diagonal: return "diagonal";
    case MeshKind::Crisscross: return "crisscross";
    case MeshKind::PerturbedCrisscross: return "perturbed_crisscross";
    case MeshKind::BoundaryChain: return "boundary_chain";
  }
  return "?";
}

Triangulation generate_mesh(MeshKind kind, int n, double eps) {
  if (n < 1) throw InvalidParameter("mesh generator: n must be >= 1");
  if (eps < 0) throw InvalidParameter("mesh generator: eps must be >= 0");
  std::vector<Point2> v;
  std::vector<std::array<int, 3>> t;
  auto grid = [&](int i, int j) { return j * (n + 1) + i; };

  switch (kind) {
    case MeshKind::Diagonal: {
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) v.push_back({double(i) / n, double(j) / n});
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          int sw = grid(i, j), se = grid(i + 1, j), ne = grid(i + 1, j + 1),
              nw = grid(i, j + 1);
          t.push_back({sw, se, nw});
          t.push_back({se, ne, nw});
        }
      break;
    }
    case MeshKind::Crisscross:
    case MeshKind::PerturbedCrisscross: {
      double shift = (kind == MeshKind::PerturbedCrisscross) ? eps / n : 0.0;
      if (kind == MeshKind::PerturbedCrisscross && eps >= 0.5)
        throw InvalidParameter("perturbed_crisscross: eps must be < 0.5");
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) v.push_back({double(i) / n, double(j) / n});
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          int c = int(v.size());
          v.push_back({(i + 0.5) / n + shift, (j + 0.5) / n});
          int sw = grid(i, j), se = grid(i + 1, j), ne = grid(i + 1, j + 1),
              nw = grid(i, j + 1);
          t.push_back({sw, se, c});
          t.push_back({se, ne, c});
          t.push_back({ne, nw, c});
          t.push_back({nw, sw, c});
        }
      break;
    }
    case MeshKind::BoundaryChain: {
      // bottom edge subdivided into n segments, apex fan from the centroid;
      // the n-1 interior bottom vertices are flat with two triangles each
      for (int i = 0; i <= n; ++i) v.push_back({double(i) / n, 0.0});
      int tr = int(v.size());
      v.push_back({1.0, 1.0});
      int tl = int(v.size());
      v.push_back({0.0, 1.0});
      int c = int(v.size());
      v.push_back({0.5, 0.5});
      for (int i = 0; i < n; ++i) t.push_back({i, i + 1, c});
      t.push_back({n, tr, c});
      t.push_back({tr, tl, c});
      t.push_back({tl, 0, c});
      break;
    }
  }
  try {
    return build_triangulation(std::move(v), std::move(t));
  } catch (const TopologyError& e) {
    throw InvalidParameter(std::string("mesh generator produced invalid mesh: ") +
                           e.what());
  }
}

std::pair<std::vector<int>, double> vertex_patch(const Triangulation& mesh, int z) {
  const auto& tris = mesh.vertex_tris.at(z);
  return {tris, triangle_set_diameter(mesh, tris)};
}

Triangulation refine_uniform(const Triangulation& mesh) {
  std::vector<Point2> v = mesh.vertices;
  std::vector<int> edge_mid(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    edge_mid[e] = int(v.size());
    v.push_back(0.5 * (mesh.vertices[ed.v0] + mesh.vertices[ed.v1]));
  }
  std::vector<std::array<int, 3>> t;
  t.reserve(4 * mesh.n_triangles());
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    auto [v0, v1, v2] = mesh.triangles[k];
    int m0 = edge_mid[mesh.tri_edges[k][0]];  // midpoint of (v1, v2)
    int m1 = edge_mid[mesh.tri_edges[k][1]];  // midpoint of (v2, v0)
    int m2 = edge_mid[mesh.tri_edges[k][2]];  // midpoint of (v0, v1)
    t.push_back({v0, m2, m1});
    t.push_back({v1, m0, m2});
    t.push_back({v2, m1, m0});
    t.push_back({m0, m1, m2});
  }
  return build_triangulation(std::move(v), std::move(t));
}

MeshQuality mesh_quality(const Triangulation& mesh) {
  MeshQuality q;
  q.h_T.reserve(mesh.n_triangles());
  for (const auto& g : mesh.geom) {
    q.h_T.push_back(g.diameter);
    q.h_max = std::max(q.h_max, g.diameter);
    q.shape_regularity = std::max(q.shape_regularity, g.diameter / g.inradius());
  }
  return q;
}

double triangle_set_diameter(const Triangulation& mesh, const std::vector<int>& tris) {
  std::set<int> vs;
  for (int t : tris)
    for (int v : mesh.triangles[t]) vs.insert(v);
  double d = 0.0;
  for (auto i = vs.begin(); i != vs.end(); ++i)
    for (auto j = std::next(i); j != vs.end(); ++j)
      d = std::max(d, dist(mesh.vertices[*i], mesh.vertices[*j]));
  return d;
}

}  // namespace sv
