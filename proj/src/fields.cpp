#include "sv/fields.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sv/quadrature.hpp"

namespace sv {

PiecewisePolynomialField& PiecewisePolynomialField::axpy(
    double s, const PiecewisePolynomialField& other) {
  assert(mesh == other.mesh && components == other.components &&
         degree == other.degree);
  for (size_t i = 0; i < polys.size(); ++i) polys[i].axpy(s, other.polys[i]);
  return *this;
}

PiecewisePolynomialField PiecewisePolynomialField::divergence_field() const {
  assert(components == 2 && degree >= 1);
  PiecewisePolynomialField d(*mesh, 1, degree - 1);
  for (int t = 0; t < mesh->n_triangles(); ++t)
    d.poly(t, 0) = divergence(poly(t, 0), poly(t, 1), mesh->geom[t]);
  return d;
}

double PiecewisePolynomialField::integral(int c) const {
  double s = 0.0;
  for (int t = 0; t < mesh->n_triangles(); ++t)
    s += integrate(poly(t, c), mesh->geom[t]);
  return s;
}

double PiecewisePolynomialField::norm_L2() const {
  double s = 0.0;
  for (int t = 0; t < mesh->n_triangles(); ++t)
    for (int c = 0; c < components; ++c)
      s += pair_L2(poly(t, c), poly(t, c), mesh->geom[t]);
  return std::sqrt(std::max(0.0, s));
}

double PiecewisePolynomialField::norm_L2_on(const std::vector<int>& tris) const {
  double s = 0.0;
  for (int t : tris)
    for (int c = 0; c < components; ++c)
      s += pair_L2(poly(t, c), poly(t, c), mesh->geom[t]);
  return std::sqrt(std::max(0.0, s));
}

double PiecewisePolynomialField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& p : polys) m = std::max(m, p.max_abs_coeff());
  return m;
}

double PiecewisePolynomialField::norm_Lp_sampled(double p,
                                                 const std::vector<int>& tris) const {
  if (std::isinf(p)) {
    // lattice sup; a lower bound on the true sup norm
    int n = std::max(4 * degree, 8);
    double m = 0.0;
    for (int t : tris)
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n - i; ++j) {
          std::array<double, 3> l{double(i) / n, double(j) / n,
                                  double(n - i - j) / n};
          double v2 = 0.0;
          for (int c = 0; c < components; ++c) {
            double x = eval(t, l, c);
            v2 += x * x;
          }
          m = std::max(m, std::sqrt(v2));
        }
    return m;
  }
  const TriangleRule& rule = triangle_rule(kTriangleQuadraturePoints);
  double s = 0.0;
  for (int t : tris) {
    double local = 0.0;
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      double v2 = 0.0;
      for (int c = 0; c < components; ++c) {
        double x = eval(t, rule.bary[q], c);
        v2 += x * x;
      }
      local += rule.w[q] * std::pow(std::sqrt(v2), p);
    }
    s += 2.0 * mesh->geom[t].area * local;
  }
  return std::pow(s, 1.0 / p);
}

void write_field_csv(const PiecewisePolynomialField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << "triangle,component,a,b,c,coefficient\n";
  char buf[64];
  for (int t = 0; t < f.mesh->n_triangles(); ++t)
    for (int c = 0; c < f.components; ++c) {
      const TrianglePoly& p = f.poly(t, c);
      int i = 0;
      for (int a = p.degree; a >= 0; --a)
        for (int b = p.degree - a; b >= 0; --b) {
          std::snprintf(buf, sizeof buf, "%.17g", p.c[i++]);
          out << t << ',' << c << ',' << a << ',' << b << ',' << (p.degree - a - b)
              << ',' << buf << '\n';
        }
    }
}

namespace {

Point2 analytic_value_sum(const FieldExpr& v, Point2 x) {
  Point2 s{0, 0};
  for (const auto& term : v.terms)
    if (term.analytic) {
      Point2 val = term.analytic->value(x);
      s = s + term.coeff * val;
    }
  return s;
}

}  // namespace

double pair_vector(const Triangulation& mesh, const FieldExpr& v, int t,
                   const TrianglePoly& wx, const TrianglePoly& wy) {
  const TriangleGeom& g = mesh.geom[t];
  double s = 0.0;
  bool any_analytic = false;
  for (const auto& term : v.terms) {
    if (term.discrete) {
      s += term.coeff * (pair_L2(term.discrete->poly(t, 0), wx, g) +
                         pair_L2(term.discrete->poly(t, 1), wy, g));
    } else {
      any_analytic = true;
    }
  }
  if (any_analytic) {
    const TriangleRule& rule = triangle_rule(kTriangleQuadraturePoints);
    double acc = 0.0;
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      Point2 x = g.point(rule.bary[q]);
      Point2 val = analytic_value_sum(v, x);
      acc += rule.w[q] * (val.x * wx.eval(rule.bary[q]) + val.y * wy.eval(rule.bary[q]));
    }
    s += 2.0 * g.area * acc;
  }
  return s;
}

double pair_divergence(const Triangulation& mesh, const FieldExpr& v, int t,
                       const TrianglePoly& q) {
  const TriangleGeom& g = mesh.geom[t];
  double s = 0.0;
  bool any_analytic = false;
  for (const auto& term : v.terms) {
    if (term.discrete) {
      TrianglePoly d = divergence(term.discrete->poly(t, 0), term.discrete->poly(t, 1), g);
      s += term.coeff * pair_L2(d, q, g);
    } else {
      any_analytic = true;
    }
  }
  if (any_analytic) {
    const TriangleRule& rule = triangle_rule(kTriangleQuadraturePoints);
    double acc = 0.0;
    for (size_t qi = 0; qi < rule.bary.size(); ++qi) {
      Point2 x = g.point(rule.bary[qi]);
      double dv = 0.0;
      for (const auto& term : v.terms)
        if (term.analytic) dv += term.coeff * term.analytic->div(x);
      acc += rule.w[qi] * dv * q.eval(rule.bary[qi]);
    }
    s += 2.0 * g.area * acc;
  }
  return s;
}

double edge_flux(const Triangulation& mesh, const FieldExpr& v, int edge,
                 int from_tri) {
  const Edge& e = mesh.edges[edge];
  double s = 0.0;
  bool any_analytic = false;
  for (const auto& term : v.terms) {
    if (term.discrete) {
      int la = mesh.local_vertex(from_tri, e.v0);
      int lb = mesh.local_vertex(from_tri, e.v1);
      EdgePoly fx = restrict_to_edge(term.discrete->poly(from_tri, 0), la, lb);
      EdgePoly fy = restrict_to_edge(term.discrete->poly(from_tri, 1), la, lb);
      EdgePoly fn(fx.degree);
      for (int m = 0; m <= fx.degree; ++m)
        fn.c[m] = e.normal.x * fx.c[m] + e.normal.y * fy.c[m];
      s += term.coeff * integrate_edge(fn, e.length);
    } else {
      any_analytic = true;
    }
  }
  if (any_analytic) {
    const GaussRule& rule = gauss_rule(kEdgeQuadraturePoints);
    Point2 a = mesh.vertices[e.v0], b = mesh.vertices[e.v1];
    double acc = 0.0;
    for (size_t i = 0; i < rule.x.size(); ++i) {
      Point2 x = a + rule.x[i] * (b - a);
      Point2 val = analytic_value_sum(v, x);
      acc += rule.w[i] * dot(val, e.normal);
    }
    s += e.length * acc;
  }
  return s;
}

std::array<double, 2> edge_component_moments(const Triangulation& mesh,
                                             const FieldExpr& v, int edge,
                                             int from_tri, const EdgePoly& q) {
  const Edge& e = mesh.edges[edge];
  std::array<double, 2> out{0.0, 0.0};
  bool any_analytic = false;
  for (const auto& term : v.terms) {
    if (term.discrete) {
      int la = mesh.local_vertex(from_tri, e.v0);
      int lb = mesh.local_vertex(from_tri, e.v1);
      for (int c = 0; c < 2; ++c) {
        EdgePoly f = restrict_to_edge(term.discrete->poly(from_tri, c), la, lb);
        out[c] += term.coeff * integrate_edge(f * q, e.length);
      }
    } else {
      any_analytic = true;
    }
  }
  if (any_analytic) {
    const GaussRule& rule = gauss_rule(kEdgeQuadraturePoints);
    Point2 a = mesh.vertices[e.v0], b = mesh.vertices[e.v1];
    for (size_t i = 0; i < rule.x.size(); ++i) {
      double t = rule.x[i];
      Point2 x = a + t * (b - a);
      Point2 val = analytic_value_sum(v, x);
      double qv = q.eval(1.0 - t, t);  // la belongs to v0
      out[0] += e.length * rule.w[i] * val.x * qv;
      out[1] += e.length * rule.w[i] * val.y * qv;
    }
  }
  return out;
}

std::array<double, 2> triangle_component_moments(const Triangulation& mesh,
                                                 const FieldExpr& v, int t,
                                                 const TrianglePoly& q) {
  const TriangleGeom& g = mesh.geom[t];
  std::array<double, 2> out{0.0, 0.0};
  bool any_analytic = false;
  for (const auto& term : v.terms) {
    if (term.discrete) {
      for (int c = 0; c < 2; ++c)
        out[c] += term.coeff * pair_L2(term.discrete->poly(t, c), q, g);
    } else {
      any_analytic = true;
    }
  }
  if (any_analytic) {
    const TriangleRule& rule = triangle_rule(kTriangleQuadraturePoints);
    double a0 = 0.0, a1 = 0.0;
    for (size_t qi = 0; qi < rule.bary.size(); ++qi) {
      Point2 x = g.point(rule.bary[qi]);
      Point2 val = analytic_value_sum(v, x);
      double qv = q.eval(rule.bary[qi]);
      a0 += rule.w[qi] * val.x * qv;
      a1 += rule.w[qi] * val.y * qv;
    }
    out[0] += 2.0 * g.area * a0;
    out[1] += 2.0 * g.area * a1;
  }
  return out;
}

double expr_divergence_L2(const Triangulation& mesh, const FieldExpr& v) {
  const TriangleRule& rule = triangle_rule(kTriangleQuadraturePoints);
  double acc = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const TriangleGeom& g = mesh.geom[t];
    std::vector<TrianglePoly> dpolys;
    for (const auto& term : v.terms)
      if (term.discrete) {
        TrianglePoly d =
            divergence(term.discrete->poly(t, 0), term.discrete->poly(t, 1), g);
        d *= term.coeff;
        dpolys.push_back(std::move(d));
      }
    double local = 0.0;
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      Point2 x = g.point(rule.bary[q]);
      double dv = 0.0;
      for (const auto& term : v.terms)
        if (term.analytic) dv += term.coeff * term.analytic->div(x);
      for (const auto& d : dpolys) dv += d.eval(rule.bary[q]);
      local += rule.w[q] * dv * dv;
    }
    acc += 2.0 * g.area * local;
  }
  return std::sqrt(std::max(0.0, acc));
}

double error_norm_Lp(const Triangulation& mesh, const FieldExpr& v,
                     const PiecewisePolynomialField& vh, double p,
                     const std::vector<int>& tris) {
  const TriangleRule& rule = triangle_rule(kTriangleQuadraturePoints);
  bool inf = std::isinf(p);
  double acc = 0.0;
  for (int t : tris) {
    const TriangleGeom& g = mesh.geom[t];
    double local = 0.0;
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      Point2 x = g.point(rule.bary[q]);
      Point2 val = analytic_value_sum(v, x);
      for (const auto& term : v.terms)
        if (term.discrete) {
          val.x += term.coeff * term.discrete->eval(t, rule.bary[q], 0);
          val.y += term.coeff * term.discrete->eval(t, rule.bary[q], 1);
        }
      val.x -= vh.eval(t, rule.bary[q], 0);
      val.y -= vh.eval(t, rule.bary[q], 1);
      double m = norm(val);
      if (inf)
        acc = std::max(acc, m);
      else
        local += rule.w[q] * std::pow(m, p);
    }
    if (!inf) acc += 2.0 * g.area * local;
  }
  return inf ? acc : std::pow(acc, 1.0 / p);
}

double error_gradient_Lp(const Triangulation& mesh, const FieldExpr& v,
                         const PiecewisePolynomialField& vh, double p,
                         const std::vector<int>& tris) {
  const TriangleRule& rule = triangle_rule(kTriangleQuadraturePoints);
  bool inf = std::isinf(p);
  double acc = 0.0;
  for (int t : tris) {
    const TriangleGeom& g = mesh.geom[t];
    // accumulated polynomial part: discrete terms minus vh
    std::array<TrianglePoly, 4> dh{deriv(vh.poly(t, 0), g, 0), deriv(vh.poly(t, 0), g, 1),
                                   deriv(vh.poly(t, 1), g, 0), deriv(vh.poly(t, 1), g, 1)};
    for (auto& d : dh) d *= -1.0;
    for (const auto& term : v.terms)
      if (term.discrete)
        for (int i = 0; i < 4; ++i)
          dh[i].axpy(term.coeff,
                     deriv(term.discrete->poly(t, i / 2), g, i % 2)
                         .raised_to(dh[i].degree));
    double local = 0.0;
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      Point2 x = g.point(rule.bary[q]);
      std::array<double, 4> grad{0, 0, 0, 0};
      for (const auto& term : v.terms)
        if (term.analytic) {
          auto ga = term.analytic->gradient(x);
          for (int i = 0; i < 4; ++i) grad[i] += term.coeff * ga[i];
        }
      for (int i = 0; i < 4; ++i) grad[i] += dh[i].eval(rule.bary[q]);
      double m = std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2] +
                           grad[3] * grad[3]);
      if (inf)
        acc = std::max(acc, m);
      else
        local += rule.w[q] * std::pow(m, p);
    }
    if (!inf) acc += 2.0 * g.area * local;
  }
  return inf ? acc : std::pow(acc, 1.0 / p);
}

double analytic_W1p_norm(const Triangulation& mesh, const AnalyticField& v, double p,
                         const std::vector<int>& tris) {
  const TriangleRule& rule = triangle_rule(kTriangleQuadraturePoints);
  bool inf = std::isinf(p);
  double acc = 0.0;
  for (int t : tris) {
    const TriangleGeom& g = mesh.geom[t];
    double local = 0.0;
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      Point2 x = g.point(rule.bary[q]);
      Point2 val = v.value(x);
      auto gr = v.gradient(x);
      double m = std::sqrt(val.x * val.x + val.y * val.y + gr[0] * gr[0] +
                           gr[1] * gr[1] + gr[2] * gr[2] + gr[3] * gr[3]);
      if (inf)
        acc = std::max(acc, m);
      else
        local += rule.w[q] * std::pow(m, p);
    }
    if (!inf) acc += 2.0 * g.area * local;
  }
  return inf ? acc : std::pow(acc, 1.0 / p);
}

}  // namespace sv
