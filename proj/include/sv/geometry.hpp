#pragma once

#include <array>
#include <cmath>

namespace sv {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

/// Affine geometry of a single (counterclockwise) triangle: signed area,
/// barycentric gradients, edge data. All polynomial calculus on a triangle
/// routes through this.
struct TriangleGeom {
  std::array<Point2, 3> p;
  double area = 0.0;                    // positive for ccw input
  std::array<Point2, 3> grad_lambda{};  // gradient of barycentric coordinate i
  double diameter = 0.0;

  TriangleGeom() = default;
  TriangleGeom(Point2 a, Point2 b, Point2 c) : p{a, b, c} {
    area = 0.5 * cross(b - a, c - a);
    // lambda_i(x) is affine with lambda_i(p_j) = delta_ij
    grad_lambda[0] = (1.0 / (2.0 * area)) * Point2{p[1].y - p[2].y, p[2].x - p[1].x};
    grad_lambda[1] = (1.0 / (2.0 * area)) * Point2{p[2].y - p[0].y, p[0].x - p[2].x};
    grad_lambda[2] = (1.0 / (2.0 * area)) * Point2{p[0].y - p[1].y, p[1].x - p[0].x};
    diameter = std::max({dist(a, b), dist(b, c), dist(c, a)});
  }

  std::array<double, 3> barycentric(Point2 x) const {
    double a0 = 0.5 * cross(p[1] - x, p[2] - x);
    double a1 = 0.5 * cross(p[2] - x, p[0] - x);
    double a2 = 0.5 * cross(p[0] - x, p[1] - x);
    return {a0 / area, a1 / area, a2 / area};
  }

  Point2 point(const std::array<double, 3>& l) const {
    return {l[0] * p[0].x + l[1] * p[1].x + l[2] * p[2].x,
            l[0] * p[0].y + l[1] * p[1].y + l[2] * p[2].y};
  }

  double edge_length(int opposite) const {
    return dist(p[(opposite + 1) % 3], p[(opposite + 2) % 3]);
  }

  double inradius() const {
    double per = edge_length(0) + edge_length(1) + edge_length(2);
    return 2.0 * area / per;
  }
};

}  // namespace sv
