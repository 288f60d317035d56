#include "sv/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace sv {

int VertexClassification::count(VertexClass c) const {
  int n = 0;
  for (auto x : cls) n += (x == c);
  return n;
}

double theta_from_angles(const std::vector<double>& angles, bool interior) {
  size_t L = angles.size();
  double theta = 0.0;
  for (size_t j = 0; j + 1 < L; ++j)
    theta = std::max(theta, std::abs(std::sin(angles[j] + angles[j + 1])));
  if (interior && L >= 2)
    theta = std::max(theta, std::abs(std::sin(angles[L - 1] + angles[0])));
  return theta;  // L == 1 on the boundary: empty max, singular corner
}

double theta_vertex(const Triangulation& mesh, int z) {
  std::vector<double> angles;
  angles.reserve(mesh.vertex_tris[z].size());
  for (int t : mesh.vertex_tris[z]) angles.push_back(mesh.angle_at(t, z));
  return theta_from_angles(angles, !mesh.boundary_vertex[z]);
}

VertexClassification classify_vertices(const Triangulation& mesh, double tol) {
  VertexClassification c;
  c.singular_tolerance = tol;
  int nv = mesh.n_vertices();
  c.theta.resize(nv);
  c.cls.resize(nv);
  for (int z = 0; z < nv; ++z) {
    c.theta[z] = theta_vertex(mesh, z);
    if (c.theta[z] > tol)
      c.cls[z] = VertexClass::NonSingular;
    else
      c.cls[z] = mesh.boundary_vertex[z] ? VertexClass::BoundarySingular
                                         : VertexClass::InteriorSingular;
  }
  return c;
}

std::vector<std::vector<int>> boundary_singular_chains(
    const Triangulation& mesh, const VertexClassification& cls) {
  // boundary adjacency restricted to boundary singular vertices
  std::map<int, std::vector<int>> adj;
  for (const Edge& e : mesh.edges) {
    if (!e.boundary) continue;
    if (cls.cls[e.v0] == VertexClass::BoundarySingular &&
        cls.cls[e.v1] == VertexClass::BoundarySingular) {
      adj[e.v0].push_back(e.v1);
      adj[e.v1].push_back(e.v0);
    }
  }
  std::vector<std::vector<int>> chains;
  std::set<int> done;
  for (int z = 0; z < mesh.n_vertices(); ++z) {
    if (cls.cls[z] != VertexClass::BoundarySingular || done.count(z)) continue;
    // walk to the path end with the smallest index, then traverse
    std::vector<int> comp{z};
    done.insert(z);
    std::vector<int> stack{z};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[u])
        if (!done.count(w)) {
          done.insert(w);
          comp.push_back(w);
          stack.push_back(w);
        }
    }
    // order along the path: endpoints have degree <= 1 within the component
    std::set<int> in_comp(comp.begin(), comp.end());
    int start = -1;
    for (int u : comp) {
      int deg = 0;
      for (int w : adj[u]) deg += in_comp.count(w);
      if (deg <= 1 && (start == -1 || u < start)) start = u;
    }
    if (start == -1) start = *std::min_element(comp.begin(), comp.end());
    std::vector<int> ordered{start};
    int prev = -1, cur = start;
    while (int(ordered.size()) < int(comp.size())) {
      int next = -1;
      for (int w : adj[cur])
        if (w != prev && in_comp.count(w)) next = w;
      if (next == -1) break;
      ordered.push_back(next);
      prev = cur;
      cur = next;
    }
    chains.push_back(std::move(ordered));
  }
  std::sort(chains.begin(), chains.end());
  return chains;
}

std::string to_string(RegionKind k) {
  switch (k) {
    case RegionKind::SingleTriangle: return "single_triangle";
    case RegionKind::InteriorSingularPatch: return "interior_singular_patch";
    case RegionKind::BoundaryChainPatch: return "boundary_chain_patch";
  }
  return "?";
}

std::string to_string(SpaceVariant v) {
  return v == SpaceVariant::Dirichlet ? "dirichlet" : "slip";
}

std::vector<int> patch_of(const Triangulation& mesh, const std::vector<int>& tris) {
  std::set<int> verts, out;
  for (int t : tris)
    for (int v : mesh.triangles[t]) verts.insert(v);
  for (int v : verts)
    for (int t : mesh.vertex_tris[v]) out.insert(t);
  return {out.begin(), out.end()};
}

double theta_of(const Triangulation& mesh, const VertexClassification& cls,
                const std::vector<int>& tris) {
  double th = std::numeric_limits<double>::infinity();
  std::set<int> verts;
  for (int t : tris)
    for (int v : mesh.triangles[t]) verts.insert(v);
  for (int v : verts)
    if (!cls.singular(v)) th = std::min(th, cls.theta[v]);
  return th;
}

RegionDecomposition build_decomposition(const Triangulation& mesh,
                                        const VertexClassification& cls,
                                        SpaceVariant variant) {
  RegionDecomposition dec;
  dec.variant = variant;
  dec.chains = boundary_singular_chains(mesh, cls);
  int nt = mesh.n_triangles();
  dec.owner.assign(nt, -1);

  auto claim = [&](int t, int region) {
    if (dec.owner[t] != -1)
      throw TopologyError(
          "decomposition overlap: triangle " + std::to_string(t) +
          " claimed by regions " + std::to_string(dec.owner[t]) + " and " +
          std::to_string(region) +
          " (singular patches intersect; hypotheses violated at this mesh size)");
    dec.owner[t] = region;
  };

  auto finish_region = [&](Region& r) {
    std::sort(r.triangles.begin(), r.triangles.end());
    r.patch_triangles = patch_of(mesh, r.triangles);
    r.theta_D = theta_of(mesh, cls, r.triangles);
    r.h_D = triangle_set_diameter(mesh, r.triangles);
  };

  // interior singular vertex patches (both variants)
  for (int z = 0; z < mesh.n_vertices(); ++z) {
    if (cls.cls[z] != VertexClass::InteriorSingular) continue;
    Region r;
    r.kind = RegionKind::InteriorSingularPatch;
    r.anchor = z;
    r.triangles = mesh.vertex_tris[z];
    // the patch of an interior singular vertex may not contain another
    // singular vertex
    std::set<int> verts;
    for (int t : r.triangles)
      for (int v : mesh.triangles[t]) verts.insert(v);
    for (int v : verts)
      if (v != z && cls.singular(v))
        throw TopologyError("interior singular patch of vertex " + std::to_string(z) +
                            " contains singular vertex " + std::to_string(v));
    finish_region(r);
    int id = int(dec.regions.size());
    for (int t : r.triangles) claim(t, id);
    dec.regions.push_back(std::move(r));
  }

  // boundary chain patches (Dirichlet variant only)
  if (variant == SpaceVariant::Dirichlet) {
    for (int j = 0; j < int(dec.chains.size()); ++j) {
      Region r;
      r.kind = RegionKind::BoundaryChainPatch;
      r.anchor = j;
      std::set<int> tris;
      for (int z : dec.chains[j])
        for (int t : mesh.vertex_tris[z]) tris.insert(t);
      r.triangles.assign(tris.begin(), tris.end());
      finish_region(r);
      int id = int(dec.regions.size());
      for (int t : r.triangles) claim(t, id);
      dec.regions.push_back(std::move(r));
    }
  }

  // remaining triangles stand alone
  for (int t = 0; t < nt; ++t) {
    if (dec.owner[t] != -1) continue;
    bool bad = false;
    for (int v : mesh.triangles[t]) {
      if (variant == SpaceVariant::Dirichlet && cls.singular(v)) bad = true;
      if (variant == SpaceVariant::Slip &&
          cls.cls[v] == VertexClass::InteriorSingular)
        bad = true;
    }
    if (bad)
      throw TopologyError("triangle " + std::to_string(t) +
                          " has a singular vertex but no owning patch");
    Region r;
    r.kind = RegionKind::SingleTriangle;
    r.anchor = t;
    r.triangles = {t};
    finish_region(r);
    claim(t, int(dec.regions.size()));
    dec.regions.push_back(std::move(r));
  }

  // canonical order: kind, then anchor; rebuild maps after sorting
  std::vector<int> perm(dec.regions.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = int(i);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    const Region &ra = dec.regions[a], &rb = dec.regions[b];
    if (ra.kind != rb.kind) return int(ra.kind) < int(rb.kind);
    return ra.anchor < rb.anchor;
  });
  std::vector<Region> sorted;
  sorted.reserve(dec.regions.size());
  for (int i : perm) sorted.push_back(std::move(dec.regions[i]));
  dec.regions = std::move(sorted);
  dec.owner.assign(nt, -1);
  dec.covering.assign(nt, {});
  for (int i = 0; i < int(dec.regions.size()); ++i) {
    for (int t : dec.regions[i].triangles) {
      if (dec.owner[t] != -1) throw TopologyError("decomposition overlap after sort");
      dec.owner[t] = i;
    }
    for (int t : dec.regions[i].patch_triangles) dec.covering[t].push_back(i);
  }
  for (int t = 0; t < nt; ++t)
    if (dec.owner[t] == -1)
      throw TopologyError("triangle " + std::to_string(t) + " not covered");
  return dec;
}

CoveringSets covering_sets(const Triangulation& mesh, const RegionDecomposition& dec,
                           int t) {
  CoveringSets cs;
  cs.region_ids = dec.covering.at(t);
  std::set<int> q;
  for (int r : cs.region_ids)
    for (int tt : dec.regions[r].patch_triangles) q.insert(tt);
  cs.union_patch.assign(q.begin(), q.end());
  cs.patch_of_union = patch_of(mesh, cs.union_patch);
  return cs;
}

}  // namespace sv
