#pragma once

#include <array>
#include <vector>

namespace sdg {

/// Degree-5 (7-point) quadrature rule on the reference triangle,
/// given as barycentric coordinates and weights summing to one.
struct TriangleRule {
  std::array<std::array<double, 3>, 7> bary;
  std::array<double, 7> weight;
};

const TriangleRule& triangle_rule_deg5();

/// 4-point Gauss-Legendre rule on [0,1]; weights sum to one.
struct EdgeRule {
  std::array<double, 4> point;
  std::array<double, 4> weight;
};

const EdgeRule& edge_rule_4pt();

/// n-point Gauss-Legendre nodes/weights on [a,b].
struct GaussRule {
  std::vector<double> point;
  std::vector<double> weight;
};

GaussRule gauss_legendre(int n, double a, double b);

}  // namespace sdg
