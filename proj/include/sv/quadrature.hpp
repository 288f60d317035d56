#pragma once

#include <array>
#include <vector>

#include "sv/geometry.hpp"

namespace sv {

/// Gauss-Legendre nodes and weights on [0,1].
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_rule(int n);

/// Collapsed (Duffy) tensor rule on the triangle, stored in barycentric
/// coordinates with weights summing to 1/2, so that
///   int_T f dx  ~=  2|T| * sum_i w_i f(bary_i).
/// Smooth integrands are resolved to machine precision for n ~ 12.
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> w;
};
const TriangleRule& triangle_rule(int n);

inline constexpr int kEdgeQuadraturePoints = 16;
inline constexpr int kTriangleQuadraturePoints = 12;  // per direction

}  // namespace sv
