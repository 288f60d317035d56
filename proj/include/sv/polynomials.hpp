#pragma once

#include <array>
#include <vector>

#include "sv/geometry.hpp"

namespace sv {

/// Polynomial on a triangle in barycentric monomial form: a dense coefficient
/// vector over the exponent triples (a,b,c) with a+b+c == degree, representing
/// sum c_(a,b,c) * l1^a l2^b l3^c. The representation is homogeneous, so a
/// polynomial of lower degree is stored multiplied by (l1+l2+l3)^m == 1.
/// Coefficients are geometry-free; the triangle enters only through integrals
/// and derivatives.
struct TrianglePoly {
  int degree = 0;
  std::vector<double> c;  // size (degree+1)(degree+2)/2

  TrianglePoly() : c(1, 0.0) {}
  explicit TrianglePoly(int deg) : degree(deg), c(ncoeffs(deg), 0.0) {}

  static int ncoeffs(int deg) { return (deg + 1) * (deg + 2) / 2; }
  // ordering: a descending, then b descending
  static int index(int deg, int a, int b) {
    int d = deg - a;
    return d * (d + 1) / 2 + (d - b);
  }
  double& at(int a, int b, int cc) { return c[index(degree, a, b)]; (void)cc; }
  double at(int a, int b, int cc) const { (void)cc; return c[index(degree, a, b)]; }

  double eval(const std::array<double, 3>& l) const;

  TrianglePoly& operator*=(double s);
  TrianglePoly& axpy(double s, const TrianglePoly& other);  // same degree

  /// Multiply by (l1+l2+l3)^m, raising the stored degree without changing the
  /// polynomial as a function on the triangle.
  TrianglePoly raised_to(int new_degree) const;

  /// Partial derivative with respect to barycentric coordinate i (degree-1
  /// homogeneous result).
  TrianglePoly dlambda(int i) const;

  double max_abs_coeff() const;
};

TrianglePoly operator+(const TrianglePoly& a, const TrianglePoly& b);
TrianglePoly operator-(const TrianglePoly& a, const TrianglePoly& b);
TrianglePoly operator*(const TrianglePoly& a, const TrianglePoly& b);

/// Cartesian derivative d/dx_dir (dir = 0 for x, 1 for y) via the chain rule
/// with the triangle's barycentric gradients.
TrianglePoly deriv(const TrianglePoly& p, const TriangleGeom& g, int dir);

/// Divergence of a vector polynomial (two components of equal degree k >= 1);
/// result has degree k-1.
TrianglePoly divergence(const TrianglePoly& vx, const TrianglePoly& vy,
                        const TriangleGeom& g);

/// Exact integral of the monomial l1^a l2^b l3^c over T:
/// 2|T| a! b! c! / (a+b+c+2)!.
double integrate_monomial(const TriangleGeom& g, int a, int b, int c);

/// Exact integral of p over T.
double integrate(const TrianglePoly& p, const TriangleGeom& g);

/// Exact L2 pairing of two polynomials over T.
double pair_L2(const TrianglePoly& p, const TrianglePoly& q, const TriangleGeom& g);

/// Polynomial on an edge in the homogeneous basis la^m lb^n, m+n == degree,
/// where la, lb are the barycentric coordinates of the edge endpoints.
struct EdgePoly {
  int degree = 0;
  std::vector<double> c;  // index m = exponent of la, size degree+1

  EdgePoly() : c(1, 0.0) {}
  explicit EdgePoly(int deg) : degree(deg), c(deg + 1, 0.0) {}
  double eval(double la, double lb) const;
};

EdgePoly operator*(const EdgePoly& a, const EdgePoly& b);

/// Restriction of a triangle polynomial to the edge between local vertices
/// la_idx and lb_idx (the remaining coordinate is set to zero).
EdgePoly restrict_to_edge(const TrianglePoly& p, int la_idx, int lb_idx);

/// Exact edge integral: |e| * sum c_m m! n! / (degree+1)!.
double integrate_edge(const EdgePoly& p, double edge_length);

/// Moment of the normal component of a vector polynomial on one edge of T:
/// int_e (f . n) q ds with n the outward unit normal of T on that edge.
/// q lives on the edge with la = coordinate of local vertex (opposite+1)%3.
double edge_normal_moment(const TrianglePoly& fx, const TrianglePoly& fy,
                          const TriangleGeom& g, int opposite_local_vertex,
                          const EdgePoly& q);

enum class NodeKind { Vertex, Edge, Interior };

/// Degree-k Lagrange basis on the uniform principal lattice of the reference
/// triangle, in barycentric form (hence valid on every triangle). Nodes carry
/// the orbit metadata needed to assemble a conforming global space: which
/// vertex, or which edge (as a local vertex pair) and the 1-based position
/// along it counted from the first vertex of the pair.
struct LagrangeBasis {
  int k = 0;
  std::vector<std::array<int, 3>> exps;  // lattice multi-indices, sum == k
  std::vector<TrianglePoly> phi;         // dual basis: phi_i(node_j) = delta_ij
  std::vector<std::array<TrianglePoly, 3>> dphi;  // dphi[i][j] = d phi_i / d lambda_j
  std::vector<NodeKind> kind;
  std::vector<int> vertex_of;                 // local vertex id for Vertex nodes
  std::vector<std::array<int, 2>> edge_of;    // local vertex pair for Edge nodes
  std::vector<int> edge_pos;                  // 1..k-1, counted from edge_of[0]

  std::array<double, 3> node_bary(int i) const {
    return {double(exps[i][0]) / k, double(exps[i][1]) / k, double(exps[i][2]) / k};
  }
  int size() const { return int(exps.size()); }
};

const LagrangeBasis& lagrange_basis(int k);  // cached per degree

}  // namespace sv
