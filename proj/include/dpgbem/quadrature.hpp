#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace dpgbem {

/// Gauss-Legendre rule on the unit interval [0, 1]; exact to degree 2n-1.
struct SegmentRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

/// Rule on the reference triangle (0,0), (1,0), (0,1). Weights sum to 1/2.
struct TriangleRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

namespace detail {

// Returns (P_n(x), P_n'(x)) by the three-term recurrence.
inline std::array<double, 2> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace detail

inline SegmentRule gauss_legendre(int n) {
  if (n < 1) throw ConfigurationError("gauss_legendre: need at least one point");
  SegmentRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.degree = 2 * n - 1;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = detail::legendre_with_derivative(n, x)[1];
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // half of the [-1,1] weight
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.5;
  return rule;
}

/// Collapsed (Duffy) tensor Gauss rule, exact for polynomials of total degree <= `degree`.
inline TriangleRule triangle_rule(int degree) {
  if (degree < 0) throw ConfigurationError("triangle_rule: negative degree");
  const int m = (degree + 3) / 2;  // ceil((degree + 2) / 2)
  const SegmentRule g = gauss_legendre(m);
  TriangleRule rule;
  rule.degree = degree;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const double s = g.points[a];
      const double t = g.points[b];
      rule.points.push_back({s, t * (1.0 - s)});
      rule.weights.push_back(g.weights[a] * g.weights[b] * (1.0 - s));
    }
  }
  return rule;
}

}  // namespace dpgbem
