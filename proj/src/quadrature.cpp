#include "sv/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace sv {

namespace {

GaussRule build_gauss(int n) {
  // Newton iteration on Legendre polynomials over [-1,1], then map to [0,1].
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.x[i] = 0.5 * (x + 1.0);
    r.w[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

std::map<int, GaussRule> g_gauss;
std::map<int, TriangleRule> g_tri;
std::mutex g_mutex;

}  // namespace

const GaussRule& gauss_rule(int n) {
  std::lock_guard<std::mutex> lock(g_mutex);
  auto it = g_gauss.find(n);
  if (it == g_gauss.end()) it = g_gauss.emplace(n, build_gauss(n)).first;
  return it->second;
}

const TriangleRule& triangle_rule(int n) {
  std::lock_guard<std::mutex> lock(g_mutex);
  auto it = g_tri.find(n);
  if (it == g_tri.end()) {
    TriangleRule t;
    const GaussRule g = build_gauss(n);
    t.bary.reserve(n * n);
    t.w.reserve(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double u = g.x[i], v = g.x[j];
        double xi = u * (1.0 - v), eta = u * v;  // jacobian u
        t.bary.push_back({1.0 - xi - eta, xi, eta});
        t.w.push_back(g.w[i] * g.w[j] * u);
      }
    it = g_tri.emplace(n, std::move(t)).first;
  }
  return it->second;
}

}  // namespace sv
