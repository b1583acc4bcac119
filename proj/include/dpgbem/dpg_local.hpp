#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

#include "fespace.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"

namespace dpgbem {

// Enriched test space per element: mu in P2, tau in [P2]^2, v in P4.
inline constexpr int kMuDim = 6;
inline constexpr int kVDim = 15;
inline constexpr int kLocalTestDofs = kMuDim + 2 * kMuDim + kVDim;  // 33

inline constexpr int mu_index(int i) { return i; }
inline constexpr int tau_index(int i, int c) { return kMuDim + c * kMuDim + i; }
inline constexpr int v_index(int j) { return 3 * kMuDim + j; }

using GramMatrix = Eigen::Matrix<double, kLocalTestDofs, kLocalTestDofs>;
using LocalBMatrix = Eigen::Matrix<double, kLocalTestDofs, kLocalTrialDofs>;
using TestVector = Eigen::Matrix<double, kLocalTestDofs, 1>;
using TrialMatrix = Eigen::Matrix<double, kLocalTrialDofs, kLocalTrialDofs>;
using TrialVector = Eigen::Matrix<double, kLocalTrialDofs, 1>;

/// Test basis tabulated once on the reference triangle (volume rule and the three edges).
class ReferenceElement {
 public:
  static constexpr int kVolumeDegree = 8;
  static constexpr int kEdgePoints = 8;

  static const ReferenceElement& instance() {
    static const ReferenceElement ref;
    return ref;
  }

  const TriangleRule& volume_rule() const { return volume_rule_; }
  const SegmentRule& edge_rule() const { return edge_rule_; }
  /// P4 basis at volume points; its first 6 functions form the P2 basis.
  const ShapeTable& volume() const { return volume_; }
  const ShapeTable& edge(int k) const { return edge_[k]; }

 private:
  ReferenceElement() : volume_rule_(triangle_rule(kVolumeDegree)), edge_rule_(gauss_legendre(kEdgePoints)) {
    const auto basis = lobatto_basis(4);
    volume_ = tabulate(basis, volume_rule_.points);
    const std::array<std::array<double, 2>, 3> ref{{{0, 0}, {1, 0}, {0, 1}}};
    for (int k = 0; k < 3; ++k) {
      const auto& a = ref[(k + 1) % 3];
      const auto& b = ref[(k + 2) % 3];
      std::vector<std::array<double, 2>> pts;
      for (double s : edge_rule_.points) pts.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
      edge_[k] = tabulate(basis, pts);
    }
  }

  TriangleRule volume_rule_;
  SegmentRule edge_rule_;
  ShapeTable volume_;
  std::array<ShapeTable, 3> edge_;
};

/// Affine element data.
struct ElementGeometry {
  std::array<Vec2, 3> p;
  std::array<int, 3> sign{1, 1, 1};  // orientation of the global flux dof on local edge k
  double area = 0;
  Eigen::Matrix2d jac;         // [p1 - p0, p2 - p0]
  Eigen::Matrix2d jac_inv_t;   // J^{-T}
  Eigen::Matrix2d metric;      // J^{-1} J^{-T}
  std::array<double, 3> edge_length{};
  std::array<Vec2, 3> normal;  // outward

  static ElementGeometry from_corners(const std::array<Vec2, 3>& p, std::array<int, 3> sign = {1, 1, 1}) {
    ElementGeometry g;
    g.p = p;
    g.sign = sign;
    g.jac.col(0) = p[1] - p[0];
    g.jac.col(1) = p[2] - p[0];
    g.area = 0.5 * g.jac.determinant();
    if (!(g.area > 0.0)) throw ArgumentError("element geometry: degenerate or clockwise triangle");
    const Eigen::Matrix2d inv = g.jac.inverse();
    g.jac_inv_t = inv.transpose();
    g.metric = inv * inv.transpose();
    for (int k = 0; k < 3; ++k) {
      const Vec2 t = p[(k + 2) % 3] - p[(k + 1) % 3];
      g.edge_length[k] = t.norm();
      g.normal[k] = Vec2(t.y(), -t.x()) / g.edge_length[k];
    }
    return g;
  }

  static ElementGeometry from_mesh(const Mesh& mesh, int t) {
    return from_corners(mesh.corners(t), {mesh.edge_sign(t, 0), mesh.edge_sign(t, 1), mesh.edge_sign(t, 2)});
  }

  Vec2 map(const std::array<double, 2>& xi) const { return p[0] + jac * Vec2(xi[0], xi[1]); }
  Vec2 gradient(const std::array<double, 2>& g) const { return jac_inv_t * Vec2(g[0], g[1]); }
  double laplacian(const std::array<double, 3>& h) const {
    return metric(0, 0) * h[0] + 2.0 * metric(0, 1) * h[1] + metric(1, 1) * h[2];
  }
};

/// Gram matrix of the test inner product
/// eps^-1 (mu,mu) + (grad mu, grad mu) + eps^-1/2 (tau,tau) + (div tau, div tau)
/// + (v,v) + eps^1/2 (grad v, grad v) + eps^3/2 (lap v, lap v).
inline GramMatrix local_gram(const ElementGeometry& geo, double eps) {
  const auto& ref = ReferenceElement::instance();
  const auto& rule = ref.volume_rule();
  const auto& tab = ref.volume();
  const double w_mu = 1.0 / eps, w_tau = 1.0 / std::sqrt(eps);
  const double w_grad_v = std::sqrt(eps), w_lap_v = eps * std::sqrt(eps);
  GramMatrix g = GramMatrix::Zero();
  std::array<double, kVDim> val{}, lap{};
  std::array<Vec2, kVDim> grad;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double w = 2.0 * geo.area * rule.weights[q];
    for (int i = 0; i < kVDim; ++i) {
      val[i] = tab.v(q, i);
      grad[i] = geo.gradient(tab.g(q, i));
      lap[i] = geo.laplacian(tab.h(q, i));
    }
    for (int i = 0; i < kMuDim; ++i) {
      for (int k = 0; k <= i; ++k) {
        const double mass = val[i] * val[k];
        g(mu_index(i), mu_index(k)) += w * (w_mu * mass + grad[i].dot(grad[k]));
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) {
            double s = grad[i][c] * grad[k][d];
            if (c == d) s += w_tau * mass;
            g(tau_index(i, c), tau_index(k, d)) += w * s;
            if (k != i) g(tau_index(k, d), tau_index(i, c)) += w * s;
          }
      }
    }
    for (int i = 0; i < kVDim; ++i)
      for (int k = 0; k <= i; ++k)
        g(v_index(i), v_index(k)) += w * (val[i] * val[k] + w_grad_v * grad[i].dot(grad[k]) + w_lap_v * lap[i] * lap[k]);
  }
  // mirror the lower triangles of the mu and v blocks
  for (int i = 0; i < kMuDim; ++i)
    for (int k = 0; k < i; ++k) g(mu_index(k), mu_index(i)) = g(mu_index(i), mu_index(k));
  for (int i = 0; i < kVDim; ++i)
    for (int k = 0; k < i; ++k) g(v_index(k), v_index(i)) = g(v_index(i), v_index(k));
  return g;
}

/// Element restriction of the ultra-weak bilinear form b; rows are test functions, columns the
/// local trial dofs (see local_trial), with flux orientation signs folded in.
inline LocalBMatrix local_b(const ElementGeometry& geo, double eps) {
  namespace lt = local_trial;
  const auto& ref = ReferenceElement::instance();
  const auto& rule = ref.volume_rule();
  const auto& tab = ref.volume();
  const double e14 = std::pow(eps, 0.25), e34 = std::pow(eps, 0.75);
  const double e54 = std::pow(eps, 1.25), e12 = std::sqrt(eps);
  LocalBMatrix b = LocalBMatrix::Zero();

  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double w = 2.0 * geo.area * rule.weights[q];
    for (int i = 0; i < kMuDim; ++i) {
      const double phi = tab.v(q, i);
      const Vec2 grad = geo.gradient(tab.g(q, i));
      // (rho, mu) + (sigma, grad mu)
      b(mu_index(i), lt::rho) += w * phi;
      b(mu_index(i), lt::sigma) += w * grad.x();
      b(mu_index(i), lt::sigma + 1) += w * grad.y();
      // eps^-1/4 (sigma, tau) + (u, div tau)
      for (int c = 0; c < 2; ++c) {
        b(tau_index(i, c), lt::sigma + c) += w * phi / e14;
        b(tau_index(i, c), lt::u) += w * grad[c];
      }
    }
    for (int j = 0; j < kVDim; ++j) {
      const double v = tab.v(q, j);
      const Vec2 grad = geo.gradient(tab.g(q, j));
      const double lap = geo.laplacian(tab.h(q, j));
      // (eps^3/4 + eps^1/4)(sigma, grad v) + (u, v) + eps^5/4 (rho, lap v)
      b(v_index(j), lt::sigma) += w * (e34 + e14) * grad.x();
      b(v_index(j), lt::sigma + 1) += w * (e34 + e14) * grad.y();
      b(v_index(j), lt::u) += w * v;
      b(v_index(j), lt::rho) += w * e54 * lap;
    }
  }

  const auto& erule = ref.edge_rule();
  for (int k = 0; k < 3; ++k) {
    const auto& tab_e = ref.edge(k);
    const double len = geo.edge_length[k];
    const Vec2& n = geo.normal[k];
    const int va = (k + 1) % 3, vb = (k + 2) % 3;
    for (std::size_t q = 0; q < erule.size(); ++q) {
      const double w = len * erule.weights[q];
      const double s = erule.points[q];
      const double hat_a = 1.0 - s, hat_b = s;
      for (int i = 0; i < kMuDim; ++i) {
        const double phi = tab_e.v(q, i);
        // -<sigmahat_a, mu>
        b(mu_index(i), lt::sighat_a + k) -= w * geo.sign[k] * phi;
        // -<uhat_a, tau . n>
        for (int c = 0; c < 2; ++c) {
          b(tau_index(i, c), lt::uhat_a + va) -= w * hat_a * phi * n[c];
          b(tau_index(i, c), lt::uhat_a + vb) -= w * hat_b * phi * n[c];
        }
      }
      for (int j = 0; j < kVDim; ++j) {
        const double v = tab_e.v(q, j);
        const double dn = geo.gradient(tab_e.g(q, j)).dot(n);
        // -eps^3/4 <sigmahat_b, v> - eps^1/2 <uhat_b, grad v . n>
        b(v_index(j), lt::sighat_b + k) -= w * e34 * geo.sign[k] * v;
        b(v_index(j), lt::uhat_b + va) -= w * e12 * hat_a * dn;
        b(v_index(j), lt::uhat_b + vb) -= w * e12 * hat_b * dn;
      }
    }
  }
  return b;
}

/// Load (f, v - eps^1/2 lap v) against the v-test functions; zero in the mu and tau rows.
inline TestVector local_load(const ElementGeometry& geo, double eps, const ScalarFunction& f) {
  const auto& ref = ReferenceElement::instance();
  const auto& rule = ref.volume_rule();
  const auto& tab = ref.volume();
  const double e12 = std::sqrt(eps);
  TestVector l = TestVector::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double fq = f(geo.map(rule.points[q]));
    if (fq == 0.0) continue;
    const double w = 2.0 * geo.area * rule.weights[q] * fq;
    for (int j = 0; j < kVDim; ++j) l[v_index(j)] += w * (tab.v(q, j) - e12 * geo.laplacian(tab.h(q, j)));
  }
  return l;
}

struct LocalSystem {
  LocalBMatrix B;
  GramMatrix G;
  TestVector l;
};

inline LocalSystem local_system(const ElementGeometry& geo, double eps, const ScalarFunction& f) {
  return {local_b(geo, eps), local_gram(geo, eps), local_load(geo, eps, f)};
}

inline Eigen::LLT<GramMatrix> factor_gram(const GramMatrix& g) {
  Eigen::LLT<GramMatrix> llt(g);
  if (llt.info() != Eigen::Success) throw InternalError("local Gram matrix is not positive definite");
  return llt;
}

/// Element contribution of b(u, Theta_beta v) and L_V(Theta_beta v), with the discrete
/// trial-to-test operator Theta = G^{-1} B.
struct LocalContribution {
  TrialMatrix S;
  TrialVector r;
};

inline LocalContribution local_dpg_contribution(const LocalSystem& sys, double beta) {
  const auto llt = factor_gram(sys.G);
  const LocalBMatrix x = llt.matrixL().solve(sys.B);
  const TestVector y = llt.matrixL().solve(sys.l);
  LocalContribution c;
  c.S.noalias() = beta * (x.transpose() * x);
  c.S = 0.5 * (c.S + c.S.transpose()).eval();
  c.r.noalias() = beta * (x.transpose() * y);
  return c;
}

/// est_Omega(T)^2 = r^T G^{-1} r with r = l - B c.
inline double est_volume_squared(const LocalSystem& sys, const TrialVector& coeffs) {
  const auto llt = factor_gram(sys.G);
  const TestVector r = sys.l - sys.B * coeffs;
  return llt.matrixL().solve(r).squaredNorm();
}

}  // namespace dpgbem
