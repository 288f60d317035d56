#include "sv/catalog.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sv {

namespace {

std::vector<AnalyticField> build_catalog() {
  std::vector<AnalyticField> fields;

  {
    AnalyticField f;
    f.name = "sinsin";
    f.value = [](Point2 p) -> Point2 {
      return {std::sin(M_PI * p.x) * std::sin(M_PI * p.y),
              p.x * (1 - p.x) * p.y * (1 - p.y)};
    };
    f.gradient = [](Point2 p) -> std::array<double, 4> {
      return {M_PI * std::cos(M_PI * p.x) * std::sin(M_PI * p.y),
              M_PI * std::sin(M_PI * p.x) * std::cos(M_PI * p.y),
              (1 - 2 * p.x) * p.y * (1 - p.y),
              p.x * (1 - p.x) * (1 - 2 * p.y)};
    };
    f.div = [](Point2 p) {
      return M_PI * std::cos(M_PI * p.x) * std::sin(M_PI * p.y) +
             p.x * (1 - p.x) * (1 - 2 * p.y);
    };
    fields.push_back(f);
  }
  {
    AnalyticField f;
    f.name = "vortex";
    f.value = [](Point2 p) -> Point2 {
      return {std::sin(M_PI * p.x) * std::cos(M_PI * p.y),
              -std::cos(M_PI * p.x) * std::sin(M_PI * p.y)};
    };
    f.gradient = [](Point2 p) -> std::array<double, 4> {
      return {M_PI * std::cos(M_PI * p.x) * std::cos(M_PI * p.y),
              -M_PI * std::sin(M_PI * p.x) * std::sin(M_PI * p.y),
              M_PI * std::sin(M_PI * p.x) * std::sin(M_PI * p.y),
              -M_PI * std::cos(M_PI * p.x) * std::cos(M_PI * p.y)};
    };
    f.div = [](Point2) { return 0.0; };
    f.divergence_free = true;
    f.zero_normal_trace = true;
    fields.push_back(f);
  }
  {
    AnalyticField f;
    f.name = "poly4";
    f.value = [](Point2 p) -> Point2 {
      double x = p.x, y = p.y;
      return {x * x * x * x - 3 * x * x * y * y + 2 * y - x,
              4 * x * x * x * y - y * y * y * y + x};
    };
    f.gradient = [](Point2 p) -> std::array<double, 4> {
      double x = p.x, y = p.y;
      return {4 * x * x * x - 6 * x * y * y - 1, -6 * x * x * y + 2,
              12 * x * x * y + 1, 4 * x * x * x - 4 * y * y * y};
    };
    f.div = [](Point2 p) {
      double x = p.x, y = p.y;
      return 8 * x * x * x - 6 * x * y * y - 4 * y * y * y - 1;
    };
    f.poly_degree = 4;
    fields.push_back(f);
  }
  {
    // stream-function bump squared: zero trace and divergence free
    AnalyticField f;
    f.name = "bump";
    auto ff = [](double x) { return x * (1 - x); };
    auto df = [](double x) { return 1 - 2 * x; };
    f.value = [=](Point2 p) -> Point2 {
      double fx = ff(p.x), gy = ff(p.y);
      return {fx * fx * 2 * gy * df(p.y), -2 * fx * df(p.x) * gy * gy};
    };
    f.gradient = [=](Point2 p) -> std::array<double, 4> {
      double fx = ff(p.x), gy = ff(p.y), dfx = df(p.x), dgy = df(p.y);
      return {4 * fx * dfx * gy * dgy, 2 * fx * fx * (dgy * dgy - 2 * gy),
              -2 * (dfx * dfx - 2 * fx) * gy * gy, -4 * fx * dfx * gy * dgy};
    };
    f.div = [](Point2) { return 0.0; };
    f.divergence_free = true;
    f.zero_trace = true;
    f.zero_normal_trace = true;
    f.poly_degree = 7;
    fields.push_back(f);
  }
  {
    AnalyticField f;
    f.name = "expwave";
    f.value = [](Point2 p) -> Point2 {
      return {std::exp(p.x) * std::cos(M_PI * p.y),
              std::exp(-p.y) * std::sin(M_PI * p.x)};
    };
    f.gradient = [](Point2 p) -> std::array<double, 4> {
      return {std::exp(p.x) * std::cos(M_PI * p.y),
              -M_PI * std::exp(p.x) * std::sin(M_PI * p.y),
              M_PI * std::exp(-p.y) * std::cos(M_PI * p.x),
              -std::exp(-p.y) * std::sin(M_PI * p.x)};
    };
    f.div = [](Point2 p) {
      return std::exp(p.x) * std::cos(M_PI * p.y) -
             std::exp(-p.y) * std::sin(M_PI * p.x);
    };
    fields.push_back(f);
  }
  {
    // radial kink at the center: regularity just above H^2, so second-order
    // convergence is observable
    AnalyticField f;
    f.name = "kink";
    const double gamma = 1.1;
    const Point2 c{0.5, 0.5};
    auto rg = [=](Point2 p, double expo) {
      double r = std::hypot(p.x - c.x, p.y - c.y);
      return r == 0.0 ? 0.0 : std::pow(r, expo);
    };
    f.value = [=](Point2 p) -> Point2 {
      double v = rg(p, gamma);
      return {v, -0.5 * v};
    };
    f.gradient = [=](Point2 p) -> std::array<double, 4> {
      double s = gamma * rg(p, gamma - 2);
      double dx = (p.x - c.x) * s, dy = (p.y - c.y) * s;
      return {dx, dy, -0.5 * dx, -0.5 * dy};
    };
    f.div = [=](Point2 p) {
      double s = gamma * rg(p, gamma - 2);
      return (p.x - c.x) * s - 0.5 * (p.y - c.y) * s;
    };
    fields.push_back(f);
  }
  return fields;
}

}  // namespace

const std::vector<AnalyticField>& field_catalog() {
  static const std::vector<AnalyticField> catalog = build_catalog();
  return catalog;
}

const AnalyticField& field_by_name(const std::string& name) {
  for (const AnalyticField& f : field_catalog())
    if (f.name == name) return f;
  throw std::invalid_argument("unknown catalog field: " + name);
}

AnalyticField box_bump(double x0, double x1, double y0, double y1) {
  AnalyticField f;
  f.name = "box_bump";
  auto phi = [](double t) { return (t <= 0 || t >= 1) ? 0.0 : t * t * (1 - t) * (1 - t); };
  auto dphi = [](double t) {
    return (t <= 0 || t >= 1) ? 0.0 : 2 * t * (1 - t) * (1 - 2 * t);
  };
  double sx = 1.0 / (x1 - x0), sy = 1.0 / (y1 - y0);
  f.value = [=](Point2 p) -> Point2 {
    double b = phi((p.x - x0) * sx) * phi((p.y - y0) * sy);
    return {b, -b};
  };
  f.gradient = [=](Point2 p) -> std::array<double, 4> {
    double tx = (p.x - x0) * sx, ty = (p.y - y0) * sy;
    double bx = sx * dphi(tx) * phi(ty);
    double by = phi(tx) * sy * dphi(ty);
    return {bx, by, -bx, -by};
  };
  f.div = [=](Point2 p) {
    double tx = (p.x - x0) * sx, ty = (p.y - y0) * sy;
    return sx * dphi(tx) * phi(ty) - phi(tx) * sy * dphi(ty);
  };
  f.zero_trace = true;
  f.zero_normal_trace = true;
  return f;
}

double catalog_divergence_mismatch(const AnalyticField& f, int points,
                                   unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double h = 1e-6, worst = 0.0;
  for (int i = 0; i < points; ++i) {
    Point2 p{u(rng), u(rng)};
    double fd = (f.value({p.x + h, p.y}).x - f.value({p.x - h, p.y}).x +
                 f.value({p.x, p.y + h}).y - f.value({p.x, p.y - h}).y) /
                (2 * h);
    worst = std::max(worst, std::abs(fd - f.div(p)));
  }
  return worst;
}

}  // namespace sv
