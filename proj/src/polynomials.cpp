#include "sv/polynomials.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace sv {

double TrianglePoly::eval(const std::array<double, 3>& l) const {
  // Horner-free direct evaluation; degrees here are small (<= ~16).
  double sum = 0.0;
  int i = 0;
  for (int a = degree; a >= 0; --a) {
    double pa = std::pow(l[0], a);
    for (int b = degree - a; b >= 0; --b) {
      int cc = degree - a - b;
      sum += c[i++] * pa * std::pow(l[1], b) * std::pow(l[2], cc);
    }
  }
  return sum;
}

TrianglePoly& TrianglePoly::operator*=(double s) {
  for (double& x : c) x *= s;
  return *this;
}

TrianglePoly& TrianglePoly::axpy(double s, const TrianglePoly& other) {
  assert(degree == other.degree);
  for (size_t i = 0; i < c.size(); ++i) c[i] += s * other.c[i];
  return *this;
}

TrianglePoly TrianglePoly::raised_to(int new_degree) const {
  assert(new_degree >= degree);
  TrianglePoly r = *this;
  // multiply by (l1+l2+l3) one degree at a time
  for (int d = degree; d < new_degree; ++d) {
    TrianglePoly next(d + 1);
    int i = 0;
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) {
        double v = r.c[i++];
        if (v == 0.0) continue;
        next.c[index(d + 1, a + 1, b)] += v;
        next.c[index(d + 1, a, b + 1)] += v;
        next.c[index(d + 1, a, b)] += v;
      }
    r = std::move(next);
  }
  return r;
}

TrianglePoly TrianglePoly::dlambda(int which) const {
  if (degree == 0) return TrianglePoly(0);
  TrianglePoly r(degree - 1);
  int i = 0;
  for (int a = degree; a >= 0; --a)
    for (int b = degree - a; b >= 0; --b) {
      int cc = degree - a - b;
      double v = c[i++];
      if (v == 0.0) continue;
      if (which == 0 && a > 0) r.c[index(degree - 1, a - 1, b)] += a * v;
      if (which == 1 && b > 0) r.c[index(degree - 1, a, b - 1)] += b * v;
      if (which == 2 && cc > 0) r.c[index(degree - 1, a, b)] += cc * v;
    }
  return r;
}

double TrianglePoly::max_abs_coeff() const {
  double m = 0.0;
  for (double x : c) m = std::max(m, std::abs(x));
  return m;
}

TrianglePoly operator+(const TrianglePoly& a, const TrianglePoly& b) {
  int d = std::max(a.degree, b.degree);
  TrianglePoly r = a.raised_to(d);
  TrianglePoly bb = b.raised_to(d);
  r.axpy(1.0, bb);
  return r;
}

TrianglePoly operator-(const TrianglePoly& a, const TrianglePoly& b) {
  int d = std::max(a.degree, b.degree);
  TrianglePoly r = a.raised_to(d);
  TrianglePoly bb = b.raised_to(d);
  r.axpy(-1.0, bb);
  return r;
}

TrianglePoly operator*(const TrianglePoly& a, const TrianglePoly& b) {
  TrianglePoly r(a.degree + b.degree);
  int i = 0;
  for (int a1 = a.degree; a1 >= 0; --a1)
    for (int b1 = a.degree - a1; b1 >= 0; --b1) {
      double va = a.c[i++];
      if (va == 0.0) continue;
      int j = 0;
      for (int a2 = b.degree; a2 >= 0; --a2)
        for (int b2 = b.degree - a2; b2 >= 0; --b2) {
          double vb = b.c[j++];
          if (vb == 0.0) continue;
          r.c[TrianglePoly::index(r.degree, a1 + a2, b1 + b2)] += va * vb;
        }
    }
  return r;
}

TrianglePoly deriv(const TrianglePoly& p, const TriangleGeom& g, int dir) {
  TrianglePoly r(std::max(p.degree - 1, 0));
  for (int i = 0; i < 3; ++i) {
    double gi = dir == 0 ? g.grad_lambda[i].x : g.grad_lambda[i].y;
    if (gi == 0.0) continue;
    r.axpy(gi, p.dlambda(i).raised_to(r.degree));
  }
  return r;
}

TrianglePoly divergence(const TrianglePoly& vx, const TrianglePoly& vy,
                        const TriangleGeom& g) {
  TrianglePoly r = deriv(vx, g, 0);
  r.axpy(1.0, deriv(vy, g, 1).raised_to(r.degree));
  return r;
}

namespace {
// a! b! c! / (a+b+c+2)! in extended precision; exponents stay small enough
// that the long double product is exact or nearly so.
long double factorial_ratio3(int a, int b, int c) {
  long double r = 1.0L;
  int n = a + b + c + 2;
  for (int i = 2; i <= b; ++i) r *= i;
  for (int i = 2; i <= c; ++i) r *= i;
  for (int i = a + 1; i <= n; ++i) r /= i;
  return r;
}
long double factorial_ratio2(int m, int n) {  // m! n! / (m+n+1)!
  long double r = 1.0L;
  for (int i = 2; i <= n; ++i) r *= i;
  for (int i = m + 1; i <= m + n + 1; ++i) r /= i;
  return r;
}
}  // namespace

double integrate_monomial(const TriangleGeom& g, int a, int b, int c) {
  return double(2.0L * (long double)g.area * factorial_ratio3(a, b, c));
}

double integrate(const TrianglePoly& p, const TriangleGeom& g) {
  long double sum = 0.0L;
  int i = 0;
  for (int a = p.degree; a >= 0; --a)
    for (int b = p.degree - a; b >= 0; --b) {
      int cc = p.degree - a - b;
      if (p.c[i] != 0.0) sum += (long double)p.c[i] * factorial_ratio3(a, b, cc);
      ++i;
    }
  return double(2.0L * (long double)g.area * sum);
}

double pair_L2(const TrianglePoly& p, const TrianglePoly& q, const TriangleGeom& g) {
  return integrate(p * q, g);
}

double EdgePoly::eval(double la, double lb) const {
  double sum = 0.0;
  for (int m = 0; m <= degree; ++m)
    sum += c[m] * std::pow(la, m) * std::pow(lb, degree - m);
  return sum;
}

EdgePoly operator*(const EdgePoly& a, const EdgePoly& b) {
  EdgePoly r(a.degree + b.degree);
  for (int m = 0; m <= a.degree; ++m)
    for (int n = 0; n <= b.degree; ++n) r.c[m + n] += a.c[m] * b.c[n];
  return r;
}

EdgePoly restrict_to_edge(const TrianglePoly& p, int la_idx, int lb_idx) {
  EdgePoly r(p.degree);
  int other = 3 - la_idx - lb_idx;
  int i = 0;
  for (int a = p.degree; a >= 0; --a)
    for (int b = p.degree - a; b >= 0; --b) {
      int cc = p.degree - a - b;
      double v = p.c[i++];
      if (v == 0.0) continue;
      std::array<int, 3> e{a, b, cc};
      if (e[other] != 0) continue;
      r.c[e[la_idx]] += v;
    }
  return r;
}

double integrate_edge(const EdgePoly& p, double edge_length) {
  long double sum = 0.0L;
  for (int m = 0; m <= p.degree; ++m)
    if (p.c[m] != 0.0)
      sum += (long double)p.c[m] * factorial_ratio2(m, p.degree - m);
  return double((long double)edge_length * sum);
}

double edge_normal_moment(const TrianglePoly& fx, const TrianglePoly& fy,
                          const TriangleGeom& g, int opp, const EdgePoly& q) {
  int la = (opp + 1) % 3, lb = (opp + 2) % 3;
  Point2 a = g.p[la], b = g.p[lb];
  Point2 t = b - a;
  double len = norm(t);
  // outward normal of a ccw triangle on the edge (a -> b) is (t.y, -t.x)/|t|
  Point2 n{t.y / len, -t.x / len};
  EdgePoly fn(fx.degree);
  {
    EdgePoly ex = restrict_to_edge(fx, la, lb);
    EdgePoly ey = restrict_to_edge(fy, la, lb);
    for (int m = 0; m <= fn.degree; ++m) fn.c[m] = n.x * ex.c[m] + n.y * ey.c[m];
  }
  return integrate_edge(fn * q, len);
}

namespace {

LagrangeBasis build_lagrange(int k) {
  if (k < 1) throw std::invalid_argument("lagrange_basis: degree must be >= 1");
  LagrangeBasis B;
  B.k = k;
  for (int a = k; a >= 0; --a)
    for (int b = k - a; b >= 0; --b) B.exps.push_back({a, b, k - a - b});
  int n = int(B.exps.size());
  B.phi.reserve(n);
  B.dphi.resize(n);
  B.kind.resize(n);
  B.vertex_of.assign(n, -1);
  B.edge_of.assign(n, {-1, -1});
  B.edge_pos.assign(n, -1);

  // Product form of the principal-lattice basis: for node (i,j,l),
  //   phi = prod_{r<i} (k l1 - r)/(i - r) * (same for l2, l3).
  // Each univariate factor is expanded exactly; the result is homogenized to
  // degree k at the end.
  auto univariate = [&](int which, int m) {
    // prod_{r=0}^{m-1} (k * l_which - r) / (m - r) as a TrianglePoly
    TrianglePoly prod(0);
    prod.c[0] = 1.0;
    for (int r = 0; r < m; ++r) {
      TrianglePoly lin(1);  // k*l_which - r  (homogeneous: -r*(l1+l2+l3))
      lin.c[TrianglePoly::index(1, which == 0 ? 1 : 0, which == 1 ? 1 : 0)] += double(k);
      lin.c[TrianglePoly::index(1, 1, 0)] -= double(r);
      lin.c[TrianglePoly::index(1, 0, 1)] -= double(r);
      lin.c[TrianglePoly::index(1, 0, 0)] -= double(r);
      prod = prod * lin;
      prod *= 1.0 / double(m - r);
    }
    return prod;
  };

  for (int i = 0; i < n; ++i) {
    auto [a, b, cc] = B.exps[i];
    TrianglePoly p = univariate(0, a) * univariate(1, b) * univariate(2, cc);
    B.phi.push_back(p.raised_to(k));

    int nz = (a > 0) + (b > 0) + (cc > 0);
    if (nz == 1) {
      B.kind[i] = NodeKind::Vertex;
      B.vertex_of[i] = a > 0 ? 0 : (b > 0 ? 1 : 2);
    } else if (nz == 2) {
      B.kind[i] = NodeKind::Edge;
      int u = a == 0 ? 1 : 0;
      int v = cc == 0 ? 1 : 2;
      B.edge_of[i] = {u, v};
      B.edge_pos[i] = B.exps[i][v];  // position counted from u toward v
    } else {
      B.kind[i] = NodeKind::Interior;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) B.dphi[i][j] = B.phi[i].dlambda(j);
  return B;
}

std::map<int, LagrangeBasis> g_bases;
std::mutex g_bases_mutex;

}  // namespace

const LagrangeBasis& lagrange_basis(int k) {
  std::lock_guard<std::mutex> lock(g_bases_mutex);
  auto it = g_bases.find(k);
  if (it == g_bases.end()) it = g_bases.emplace(k, build_lagrange(k)).first;
  return it->second;
}

}  // namespace sv
