#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sv/mesh.hpp"
#include "sv/polynomials.hpp"

namespace sv {

/// Scalar or 2-vector piecewise polynomial data in barycentric coefficient
/// form, one polynomial per triangle and component (component-major within a
/// triangle). All per-triangle degrees are equal.
struct PiecewisePolynomialField {
  const Triangulation* mesh = nullptr;
  int components = 1;
  int degree = 0;
  std::vector<TrianglePoly> polys;  // size n_triangles * components

  PiecewisePolynomialField() = default;
  PiecewisePolynomialField(const Triangulation& m, int comps, int deg)
      : mesh(&m), components(comps), degree(deg),
        polys(size_t(m.n_triangles()) * comps, TrianglePoly(deg)) {}

  TrianglePoly& poly(int t, int c) { return polys[size_t(t) * components + c]; }
  const TrianglePoly& poly(int t, int c) const {
    return polys[size_t(t) * components + c];
  }

  double eval(int t, const std::array<double, 3>& bary, int c = 0) const {
    return poly(t, c).eval(bary);
  }

  PiecewisePolynomialField& axpy(double s, const PiecewisePolynomialField& other);

  /// Divergence of a vector field (components == 2); degree drops by one.
  PiecewisePolynomialField divergence_field() const;

  double integral(int c = 0) const;
  double norm_L2() const;                       // all components
  double norm_L2_on(const std::vector<int>& tris) const;
  double max_abs_coeff() const;

  /// One-sided L^p estimates by dense lattice sampling (order 4k lattice):
  /// the sup norm is approached from below.
  double norm_Lp_sampled(double p, const std::vector<int>& tris) const;
};

void write_field_csv(const PiecewisePolynomialField& f, const std::string& path);

/// Closed-form field with analytic first derivatives; the verification
/// harness's representation of a generic W^{1,p} input.
struct AnalyticField {
  std::string name;
  std::function<Point2(Point2)> value;
  // gradient rows: (d v1/dx, d v1/dy, d v2/dx, d v2/dy)
  std::function<std::array<double, 4>(Point2)> gradient;
  std::function<double(Point2)> div;

  bool zero_trace = false;         // v = 0 on the unit-square boundary
  bool zero_normal_trace = false;  // v.n = 0 there
  bool divergence_free = false;
  int poly_degree = -1;            // >= 0 when the field is a global polynomial
};

/// Linear combination of analytic and discrete terms. Keeps integrals exact
/// for the discrete part and quadrature-based only for the analytic part.
struct FieldExpr {
  struct Term {
    double coeff = 1.0;
    const AnalyticField* analytic = nullptr;
    const PiecewisePolynomialField* discrete = nullptr;
  };
  std::vector<Term> terms;

  static FieldExpr of(const AnalyticField& f, double c = 1.0) {
    FieldExpr e;
    e.terms.push_back({c, &f, nullptr});
    return e;
  }
  static FieldExpr of(const PiecewisePolynomialField& f, double c = 1.0) {
    FieldExpr e;
    e.terms.push_back({c, nullptr, &f});
    return e;
  }
  FieldExpr& add(const PiecewisePolynomialField& f, double c) {
    terms.push_back({c, nullptr, &f});
    return *this;
  }
  FieldExpr& add(const AnalyticField& f, double c) {
    terms.push_back({c, &f, nullptr});
    return *this;
  }
};

/// int_T expr . (wx, wy) dx, exact for discrete terms.
double pair_vector(const Triangulation& mesh, const FieldExpr& v, int t,
                   const TrianglePoly& wx, const TrianglePoly& wy);

/// int_T div(expr) q dx, exact for discrete terms.
double pair_divergence(const Triangulation& mesh, const FieldExpr& v, int t,
                       const TrianglePoly& q);

/// int_e expr . n ds with n the stored unit normal of the edge; discrete
/// terms are restricted from the side of triangle `from_tri`.
double edge_flux(const Triangulation& mesh, const FieldExpr& v, int edge,
                 int from_tri);

/// Component moments int_e v_c q ds against an edge polynomial whose first
/// coordinate belongs to the lower-index endpoint of the edge.
std::array<double, 2> edge_component_moments(const Triangulation& mesh,
                                             const FieldExpr& v, int edge,
                                             int from_tri, const EdgePoly& q);

/// Component moments int_T v_c q dx.
std::array<double, 2> triangle_component_moments(const Triangulation& mesh,
                                                 const FieldExpr& v, int t,
                                                 const TrianglePoly& q);

/// L2 norm of div(expr) over the whole mesh (quadrature for analytic terms).
double expr_divergence_L2(const Triangulation& mesh, const FieldExpr& v);

/// L^p norm of (expr - discrete) over a triangle set; quadrature-based.
double error_norm_Lp(const Triangulation& mesh, const FieldExpr& v,
                     const PiecewisePolynomialField& vh, double p,
                     const std::vector<int>& tris);

/// Same for the gradient (H^1 seminorm distance when p == 2).
double error_gradient_Lp(const Triangulation& mesh, const FieldExpr& v,
                         const PiecewisePolynomialField& vh, double p,
                         const std::vector<int>& tris);

/// W^{1,p} norm of an analytic field over a triangle set (quadrature).
double analytic_W1p_norm(const Triangulation& mesh, const AnalyticField& v, double p,
                         const std::vector<int>& tris);

}  // namespace sv
