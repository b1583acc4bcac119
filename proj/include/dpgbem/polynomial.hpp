#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace dpgbem {

/// Dense bivariate polynomial sum_{i+j<=deg} c_ij xi^i eta^j on the reference triangle.
class Poly2 {
 public:
  Poly2() : Poly2(0) {}
  explicit Poly2(int degree) : degree_(degree), coeffs_((degree + 1) * (degree + 1), 0.0) {}

  static Poly2 constant(double c) {
    Poly2 p(0);
    p.at(0, 0) = c;
    return p;
  }
  /// a + b*xi + c*eta
  static Poly2 linear(double a, double b, double c) {
    Poly2 p(1);
    p.at(0, 0) = a;
    p.at(1, 0) = b;
    p.at(0, 1) = c;
    return p;
  }

  int degree() const { return degree_; }
  double& at(int i, int j) { return coeffs_[i * (degree_ + 1) + j]; }
  double at(int i, int j) const {
    return (i + j <= degree_) ? coeffs_[i * (degree_ + 1) + j] : 0.0;
  }

  double operator()(double xi, double eta) const {
    double result = 0.0;
    for (int i = degree_; i >= 0; --i) {
      double row = 0.0;
      for (int j = degree_ - i; j >= 0; --j) row = row * eta + at(i, j);
      result = result * xi + row;
    }
    return result;
  }

  Poly2 dxi() const {
    Poly2 d(std::max(degree_ - 1, 0));
    for (int i = 1; i <= degree_; ++i)
      for (int j = 0; i + j <= degree_; ++j) d.at(i - 1, j) = i * at(i, j);
    return d;
  }
  Poly2 deta() const {
    Poly2 d(std::max(degree_ - 1, 0));
    for (int i = 0; i <= degree_; ++i)
      for (int j = 1; i + j <= degree_; ++j) d.at(i, j - 1) = j * at(i, j);
    return d;
  }

  friend Poly2 operator+(const Poly2& a, const Poly2& b) {
    Poly2 r(std::max(a.degree_, b.degree_));
    for (int i = 0; i <= r.degree_; ++i)
      for (int j = 0; i + j <= r.degree_; ++j) r.at(i, j) = a.at(i, j) + b.at(i, j);
    return r;
  }
  friend Poly2 operator-(const Poly2& a, const Poly2& b) { return a + (-1.0) * b; }
  friend Poly2 operator*(double s, Poly2 a) {
    for (auto& c : a.coeffs_) c *= s;
    return a;
  }
  friend Poly2 operator*(const Poly2& a, const Poly2& b) {
    Poly2 r(a.degree_ + b.degree_);
    for (int i = 0; i <= a.degree_; ++i)
      for (int j = 0; i + j <= a.degree_; ++j) {
        const double c = a.at(i, j);
        if (c == 0.0) continue;
        for (int k = 0; k <= b.degree_; ++k)
          for (int l = 0; k + l <= b.degree_; ++l) r.at(i + k, j + l) += c * b.at(k, l);
      }
    return r;
  }

  /// Exact integral over the reference triangle: int xi^i eta^j = i! j! / (i+j+2)!.
  double integrate_reference() const {
    double sum = 0.0;
    for (int i = 0; i <= degree_; ++i)
      for (int j = 0; i + j <= degree_; ++j)
        sum += at(i, j) * std::tgamma(i + 1.0) * std::tgamma(j + 1.0) / std::tgamma(i + j + 3.0);
    return sum;
  }

 private:
  int degree_;
  std::vector<double> coeffs_;
};

namespace detail {

/// Monomial coefficients (ascending) of the Legendre polynomial L_n.
inline std::vector<double> legendre_coefficients(int n) {
  std::vector<double> p0{1.0}, p1{0.0, 1.0};
  if (n == 0) return p0;
  for (int k = 2; k <= n; ++k) {
    std::vector<double> pk(k + 1, 0.0);
    for (std::size_t i = 0; i < p1.size(); ++i) pk[i + 1] += (2.0 * k - 1.0) / k * p1[i];
    for (std::size_t i = 0; i < p0.size(); ++i) pk[i] -= (k - 1.0) / k * p0[i];
    p0 = std::move(p1);
    p1 = std::move(pk);
  }
  return p1;
}

/// Lobatto kernel phi_j = 4 l_{j+2} / (1 - x^2) as ascending monomial coefficients.
inline std::vector<double> lobatto_kernel_coefficients(int j) {
  const int k = j + 2;
  const auto lk = legendre_coefficients(k);
  const auto lk2 = legendre_coefficients(k - 2);
  std::vector<double> p(lk);
  for (std::size_t i = 0; i < lk2.size(); ++i) p[i] -= lk2[i];
  // p = (1 - x^2) q  =>  q_i = p_i + q_{i-2}
  std::vector<double> q(k - 1, 0.0);
  for (int i = 0; i <= k - 2; ++i) q[i] = p[i] + (i >= 2 ? q[i - 2] : 0.0);
  const double scale = 4.0 / std::sqrt(2.0 * (2.0 * k - 1.0));
  for (auto& c : q) c *= scale;
  return q;
}

/// Substitutes a polynomial argument into a univariate polynomial (Horner).
inline Poly2 compose(const std::vector<double>& coeffs, const Poly2& arg) {
  Poly2 r = Poly2::constant(0.0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * arg + Poly2::constant(*it);
  return r;
}

}  // namespace detail

/// Hierarchical basis of P^p on the reference triangle built from Lobatto shape functions.
///
/// Ordering is by degree: {1}, {xi, eta}, then per degree k >= 2 the three edge functions
/// lambda_a lambda_b phi_{k-2}(lambda_b - lambda_a) followed by the k-2 bubbles
/// lambda_1 lambda_2 lambda_3 L_{n1}(lambda_3 - lambda_2) L_{n2}(lambda_2 - lambda_1).
/// The P^p basis is therefore a prefix of the P^{p+1} basis.
inline std::vector<Poly2> lobatto_basis(int p) {
  if (p < 0 || p > 4) throw ConfigurationError("lobatto_basis: supported degrees are 0..4");
  const Poly2 l1 = Poly2::linear(1.0, -1.0, -1.0);
  const Poly2 l2 = Poly2::linear(0.0, 1.0, 0.0);
  const Poly2 l3 = Poly2::linear(0.0, 0.0, 1.0);
  std::vector<Poly2> basis{Poly2::constant(1.0)};
  if (p >= 1) {
    basis.push_back(l2);
    basis.push_back(l3);
  }
  const std::array<std::array<const Poly2*, 2>, 3> edges{{{&l1, &l2}, {&l2, &l3}, {&l3, &l1}}};
  for (int k = 2; k <= p; ++k) {
    const auto kernel = detail::lobatto_kernel_coefficients(k - 2);
    for (const auto& e : edges) {
      const Poly2& la = *e[0];
      const Poly2& lb = *e[1];
      basis.push_back(la * lb * detail::compose(kernel, lb - la));
    }
    for (int n1 = 0; n1 <= k - 3; ++n1) {
      const int n2 = k - 3 - n1;
      basis.push_back(l1 * l2 * l3 * detail::compose(detail::legendre_coefficients(n1), l3 - l2) *
                      detail::compose(detail::legendre_coefficients(n2), l2 - l1));
    }
  }
  return basis;
}

/// Values, reference gradients and reference Hessians (xx, xy, yy) of a basis at points.
struct ShapeTable {
  int dim = 0;
  int npoints = 0;
  std::vector<double> value;                 // [q * dim + i]
  std::vector<std::array<double, 2>> grad;   // [q * dim + i]
  std::vector<std::array<double, 3>> hess;   // [q * dim + i]

  double v(int q, int i) const { return value[q * dim + i]; }
  const std::array<double, 2>& g(int q, int i) const { return grad[q * dim + i]; }
  const std::array<double, 3>& h(int q, int i) const { return hess[q * dim + i]; }
  /// Laplacian on the reference element.
  double laplacian(int q, int i) const { return h(q, i)[0] + h(q, i)[2]; }
};

inline ShapeTable tabulate(const std::vector<Poly2>& basis,
                           const std::vector<std::array<double, 2>>& points) {
  ShapeTable t;
  t.dim = static_cast<int>(basis.size());
  t.npoints = static_cast<int>(points.size());
  t.value.resize(t.dim * t.npoints);
  t.grad.resize(t.dim * t.npoints);
  t.hess.resize(t.dim * t.npoints);
  for (int i = 0; i < t.dim; ++i) {
    const Poly2 dx = basis[i].dxi();
    const Poly2 dy = basis[i].deta();
    const Poly2 dxx = dx.dxi(), dxy = dx.deta(), dyy = dy.deta();
    for (int q = 0; q < t.npoints; ++q) {
      const auto [x, y] = points[q];
      t.value[q * t.dim + i] = basis[i](x, y);
      t.grad[q * t.dim + i] = {dx(x, y), dy(x, y)};
      t.hess[q * t.dim + i] = {dxx(x, y), dxy(x, y), dyy(x, y)};
    }
  }
  return t;
}

/// Tabulates the P^p test basis at the points of a triangle rule.
inline ShapeTable test_shape_functions(int p, const TriangleRule& rule) {
  return tabulate(lobatto_basis(p), rule.points);
}

}  // namespace dpgbem
