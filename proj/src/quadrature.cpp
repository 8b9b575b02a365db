#include "sdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sdg {

const TriangleRule& triangle_rule_deg5() {
  // Radon's degree-5 rule: centroid plus two symmetric orbits.
  static const TriangleRule rule = [] {
    TriangleRule r;
    const double a1 = 0.0597158717897698;
    const double b1 = 0.4701420641051151;
    const double a2 = 0.7974269853530873;
    const double b2 = 0.1012865073234563;
    const double w0 = 0.225;
    const double w1 = 0.1323941527885062;
    const double w2 = 0.1259391805448271;
    r.bary = {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
               {a1, b1, b1},
               {b1, a1, b1},
               {b1, b1, a1},
               {a2, b2, b2},
               {b2, a2, b2},
               {b2, b2, a2}}};
    r.weight = {w0, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

const EdgeRule& edge_rule_4pt() {
  static const EdgeRule rule = [] {
    EdgeRule r;
    const double t1 = std::sqrt((3.0 - 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
    const double t2 = std::sqrt((3.0 + 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
    r.point = {0.5 * (1.0 - t2), 0.5 * (1.0 - t1), 0.5 * (1.0 + t1), 0.5 * (1.0 + t2)};
    const double w1 = (18.0 + std::sqrt(30.0)) / 72.0;
    const double w2 = (18.0 - std::sqrt(30.0)) / 72.0;
    r.weight = {w2, w1, w1, w2};
    return r;
  }();
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.point.resize(n);
  rule.weight.resize(n);
  // Newton iteration on P_n, nodes seeded by the Chebyshev approximation.
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.point[i] = x;
    rule.point[n - 1 - i] = -x;
    rule.weight[i] = w;
    rule.weight[n - 1 - i] = w;
  }
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.point[i] = mid - half * rule.point[i];
    rule.weight[i] *= half;
  }
  return rule;
}

}  // namespace sdg
