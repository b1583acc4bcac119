#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fespace.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace dpgbem {

// Laplace kernels in 2D with G(z) = -log|z| / (2 pi). Panel primitives below are written in
// the panel frame: for a point x, p = (x - a) . tangent and d = (x - a) . normal.
namespace panel {

inline constexpr double kInv2Pi = 0.5 / std::numbers::pi;

struct Frame {
  double p, d, h;
};

inline Frame frame(const BoundaryPanel& e, const Vec2& x) {
  const Vec2 r = x - e.a;
  return {r.dot(e.tangent), r.dot(e.normal), e.length};
}

/// Angle subtended by the panel, int_0^h d / ((p-t)^2 + d^2) dt. Zero on the panel's line.
inline double angle(const Frame& f) {
  if (f.d == 0.0) return 0.0;
  return std::atan2(f.d * f.h, f.p * (f.p - f.h) + f.d * f.d);
}

/// int_0^h (p-t) / ((p-t)^2 + d^2) dt (principal value when x lies on the panel).
inline double log_ratio(const Frame& f) {
  const double ra2 = f.p * f.p + f.d * f.d;
  const double q = f.p - f.h;
  const double rb2 = q * q + f.d * f.d;
  return 0.5 * std::log(ra2 / rb2);
}

/// int_0^h log|x - y(t)| dt.
inline double log_integral(const Frame& f) {
  const double q = f.p - f.h;
  const double ra2 = f.p * f.p + f.d * f.d;
  const double rb2 = q * q + f.d * f.d;
  const double ta = f.p == 0.0 ? 0.0 : 0.5 * f.p * std::log(ra2);
  const double tb = q == 0.0 ? 0.0 : 0.5 * q * std::log(rb2);
  return ta - tb - f.h + f.d * angle(f);
}

/// Double-layer weights of the two hat functions (start, end) of the panel:
/// int_0^h d / |x-y|^2 (1 - t/h) dt and int_0^h d / |x-y|^2 t/h dt.
inline std::array<double, 2> dlp_weights(const Frame& f) {
  if (f.d == 0.0) return {0.0, 0.0};
  const double a = angle(f);
  const double j1 = (f.p * a - f.d * log_ratio(f)) / f.h;
  return {a - j1, j1};
}

/// Gradients w.r.t. x of the two double-layer weights.
inline std::array<Vec2, 2> dlp_weight_gradients(const BoundaryPanel& e, const Frame& f) {
  const double p = f.p, d = f.d, h = f.h, q = p - h;
  const double ra2 = p * p + d * d, rb2 = q * q + d * d;
  const double a = angle(f);
  const double lg = 0.5 * std::log(ra2 / rb2);
  const double a_p = d / ra2 - d / rb2;
  const double a_d = -p / ra2 + q / rb2;
  const double lg_p = p / ra2 - q / rb2;
  const double lg_d = d / ra2 - d / rb2;
  const double j1_p = (a + p * a_p - d * lg_p) / h;
  const double j1_d = (p * a_d - lg - d * lg_d) / h;
  const Vec2 grad_a = a_p * e.tangent + a_d * e.normal;
  const Vec2 grad_j1 = j1_p * e.tangent + j1_d * e.normal;
  return {grad_a - grad_j1, grad_j1};
}

/// int_E (x - y) / |x - y|^2 ds_y; the normal part is dropped for x on the panel.
inline Vec2 slp_gradient_kernel(const BoundaryPanel& e, const Frame& f) {
  return log_ratio(f) * e.tangent + angle(f) * e.normal;
}

/// Exact self-interaction int_0^h int_0^h log|s - t| ds dt = h^2 (log h - 3/2).
inline double self_log_integral(double h) { return h * h * (std::log(h) - 1.5); }

inline double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto point_segment = [](const Vec2& x, const Vec2& s0, const Vec2& s1) {
    const Vec2 t = s1 - s0;
    const double l2 = t.squaredNorm();
    double s = l2 > 0 ? (x - s0).dot(t) / l2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return (x - (s0 + s * t)).norm();
  };
  return std::min({point_segment(a, c, d), point_segment(b, c, d), point_segment(c, a, b),
                   point_segment(d, a, b)});
}

/// int over the segment [a, b] of g(x) ds_x, where g has singularities on `target`.
/// The segment is bisected until each piece is at least twice its length away from the
/// target; a fixed Gauss rule is used on each piece.
template <class T, class Integrand>
T integrate_outer(const Vec2& a, const Vec2& b, const BoundaryPanel& target, const SegmentRule& rule,
                  Integrand&& g, T zero, int max_depth = 50) {
  struct Piece {
    double s0, s1;
    int depth;
  };
  T sum = zero;
  const Vec2 dir = b - a;
  const double len = dir.norm();
  Piece stack[2 * 64];
  int top = 0;
  stack[top++] = {0.0, 1.0, 0};
  while (top > 0) {
    const Piece pc = stack[--top];
    const Vec2 x0 = a + pc.s0 * dir, x1 = a + pc.s1 * dir;
    const double plen = (pc.s1 - pc.s0) * len;
    if (pc.depth < max_depth && plen > 0.5 * segment_distance(x0, x1, target.a, target.b)) {
      const double mid = 0.5 * (pc.s0 + pc.s1);
      stack[top++] = {pc.s0, mid, pc.depth + 1};
      stack[top++] = {mid, pc.s1, pc.depth + 1};
      continue;
    }
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double s = pc.s0 + rule.points[q] * (pc.s1 - pc.s0);
      sum += (rule.weights[q] * plen) * g(a + s * dir);
    }
  }
  return sum;
}

}  // namespace panel

/// Dense Galerkin matrices of the boundary integral operators on a boundary mesh.
///
/// V: P0 x P0 single layer; K: rows P0 test, columns S1 trial (K[j][i] = <K phi_i, psi_j>);
/// W: S1 x S1 hypersingular; M: P0 x S1 mass; a = (M/2 - K)^T 1; b = V^T 1.
struct BoundaryOperatorSet {
  Eigen::MatrixXd V, K, W, M;
  Eigen::VectorXd a, b;

  int size() const { return static_cast<int>(V.rows()); }
};

inline constexpr int kBemGaussPoints = 8;

inline Eigen::MatrixXd single_layer_matrix(const BoundaryMesh& bm) {
  if (bm.diameter() >= 1.0) throw ConfigurationError("single layer: diam(Omega) must be < 1 for coercivity");
  const int n = bm.size();
  const SegmentRule rule = gauss_legendre(kBemGaussPoints);
  Eigen::MatrixXd V(n, n);
  for (int j = 0; j < n; ++j) {
    const auto& ej = bm.panels[j];
    V(j, j) = -panel::kInv2Pi * panel::self_log_integral(ej.length);
    for (int k = j + 1; k < n; ++k) {
      const auto& ek = bm.panels[k];
      const double v = panel::integrate_outer(
          ej.a, ej.b, ek, rule, [&](const Vec2& x) { return panel::log_integral(panel::frame(ek, x)); }, 0.0);
      V(j, k) = V(k, j) = -panel::kInv2Pi * v;
    }
  }
  return V;
}

inline Eigen::MatrixXd double_layer_matrix(const BoundaryMesh& bm) {
  const int n = bm.size();
  const SegmentRule rule = gauss_legendre(kBemGaussPoints);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const auto& ej = bm.panels[j];
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;  // (x - y) . n_y = 0 on a straight panel
      const auto& ek = bm.panels[k];
      const Eigen::Vector2d w = panel::integrate_outer(
          ej.a, ej.b, ek, rule,
          [&](const Vec2& x) {
            const auto ww = panel::dlp_weights(panel::frame(ek, x));
            return Eigen::Vector2d(ww[0], ww[1]);
          },
          Eigen::Vector2d::Zero().eval());
      K(j, ek.start_node) += panel::kInv2Pi * w[0];
      K(j, ek.end_node) += panel::kInv2Pi * w[1];
    }
  }
  return K;
}

inline Eigen::MatrixXd boundary_mass_matrix(const BoundaryMesh& bm) {
  const int n = bm.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    M(j, bm.panels[j].start_node) += 0.5 * bm.panels[j].length;
    M(j, bm.panels[j].end_node) += 0.5 * bm.panels[j].length;
  }
  return M;
}

/// <W u, v> = <V u', v'> with arc-length derivatives of the S1 hats (constant per panel).
inline Eigen::MatrixXd hypersingular_matrix(const BoundaryMesh& bm, const Eigen::MatrixXd& V) {
  const int n = bm.size();
  Eigen::MatrixXd W(n, n);
  // node i: derivative +1/h on panel i-1 (ending at i), -1/h on panel i (starting at i)
  auto panels_of = [&](int i) {
    const int prev = (i + n - 1) % n;
    return std::array<std::pair<int, double>, 2>{
        {{prev, 1.0 / bm.panels[prev].length}, {i, -1.0 / bm.panels[i].length}}};
  };
  for (int i = 0; i < n; ++i) {
    const auto pi = panels_of(i);
    for (int k = i; k < n; ++k) {
      const auto pk = panels_of(k);
      double s = 0.0;
      for (const auto& [j, dj] : pi)
        for (const auto& [l, dl] : pk) s += dj * V(j, l) * dl;
      W(i, k) = W(k, i) = s;
    }
  }
  return W;
}

inline Eigen::MatrixXd hypersingular_matrix(const BoundaryMesh& bm) {
  return hypersingular_matrix(bm, single_layer_matrix(bm));
}

inline BoundaryOperatorSet assemble_boundary_operators(const BoundaryMesh& bm) {
  BoundaryOperatorSet ops;
  ops.V = single_layer_matrix(bm);
  ops.K = double_layer_matrix(bm);
  ops.M = boundary_mass_matrix(bm);
  ops.W = hypersingular_matrix(bm, ops.V);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(bm.size());
  ops.a = (0.5 * ops.M - ops.K).transpose() * ones;
  ops.b = ops.V.transpose() * ones;
  return ops;
}

/// Matrix of the coupling form c((u,s),(v,t)); rows test (v then t), columns trial (u then s).
inline Eigen::MatrixXd coupling_matrix(const BoundaryOperatorSet& ops, double eps) {
  const int n = ops.size();
  const double e34 = std::pow(eps, 0.75), e32 = eps * std::sqrt(eps);
  Eigen::MatrixXd C(2 * n, 2 * n);
  C.topLeftCorner(n, n) = ops.W + ops.a * ops.a.transpose();
  C.topRightCorner(n, n) = e34 * ((0.5 * ops.M + ops.K).transpose() + ops.a * ops.b.transpose());
  C.bottomLeftCorner(n, n) = e34 * ((0.5 * ops.M - ops.K) + ops.b * ops.a.transpose());
  C.bottomRightCorner(n, n) = e32 * (ops.V + ops.b * ops.b.transpose());
  return C;
}

/// eps^{-1/2} c((u0, eps^{-3/4} phi0), .) for discrete data (u0 in S1, phi0 in P0).
inline Eigen::VectorXd coupling_rhs(const BoundaryOperatorSet& ops, double eps, const Eigen::VectorXd& u0,
                                    const Eigen::VectorXd& phi0) {
  const int n = ops.size();
  Eigen::VectorXd x(2 * n);
  x.head(n) = u0;
  x.tail(n) = std::pow(eps, -0.75) * phi0;
  return coupling_matrix(ops, eps) * x / std::sqrt(eps);
}

/// Pointwise Calderon residuals for a discrete S1 density du and P0 density dphi:
///   R1  = W du + (1/2 + K') dphi
///   R2' = d/ds [ (1/2 - K) du + V dphi ].
/// `s` is the local coordinate on panel j and must lie strictly inside (0, 1).
inline std::array<double, 2> calderon_residual_at(const BoundaryMesh& bm, const Eigen::VectorXd& du,
                                                  const Eigen::VectorXd& dphi, int j, double s) {
  if (!(s > 0.0 && s < 1.0)) throw ArgumentError("calderon_residual: point must lie strictly inside the panel");
  const auto& ej = bm.panels[j];
  const Vec2 x = ej.a + s * (ej.b - ej.a);
  const Vec2& tx = ej.tangent;
  const Vec2& nx = ej.normal;
  double dv_du = 0.0;   // d/ds V(du')
  double kp_phi = 0.0;  // K' dphi
  double dk_u = 0.0;    // d/ds K du
  double dv_phi = 0.0;  // d/ds V dphi
  for (int l = 0; l < bm.size(); ++l) {
    const auto& el = bm.panels[l];
    const auto f = panel::frame(el, x);
    const double slope = (du[el.end_node] - du[el.start_node]) / el.length;
    if (l == j) {
      const double lr = panel::log_ratio(f);
      dv_du += -panel::kInv2Pi * slope * lr;
      dv_phi += -panel::kInv2Pi * dphi[l] * lr;
      continue;
    }
    const Vec2 g = panel::slp_gradient_kernel(el, f);
    dv_du += -panel::kInv2Pi * slope * g.dot(tx);
    dv_phi += -panel::kInv2Pi * dphi[l] * g.dot(tx);
    kp_phi += -panel::kInv2Pi * dphi[l] * g.dot(nx);
    const auto gw = panel::dlp_weight_gradients(el, f);
    dk_u += panel::kInv2Pi * (du[el.start_node] * gw[0].dot(tx) + du[el.end_node] * gw[1].dot(tx));
  }
  const double own_slope = (du[ej.end_node] - du[ej.start_node]) / ej.length;
  const double r1 = -dv_du + 0.5 * dphi[j] + kp_phi;
  const double r2 = 0.5 * own_slope - dk_u + dv_phi;
  return {r1, r2};
}

/// Residuals at `rule` points of every panel: result[j][q] = {R1, R2'}.
inline std::vector<std::vector<std::array<double, 2>>> calderon_residual(const BoundaryMesh& bm,
                                                                         const Eigen::VectorXd& du,
                                                                         const Eigen::VectorXd& dphi,
                                                                         const SegmentRule& rule) {
  std::vector<std::vector<std::array<double, 2>>> r(bm.size());
  for (int j = 0; j < bm.size(); ++j)
    for (double s : rule.points) r[j].push_back(calderon_residual_at(bm, du, dphi, j, s));
  return r;
}

/// Double-layer potential of an S1 density at x off the boundary.
inline double double_layer_potential(const BoundaryMesh& bm, const Eigen::VectorXd& density, const Vec2& x) {
  double s = 0.0;
  for (const auto& e : bm.panels) {
    const auto w = panel::dlp_weights(panel::frame(e, x));
    s += w[0] * density[e.start_node] + w[1] * density[e.end_node];
  }
  return panel::kInv2Pi * s;
}

/// Single-layer potential of a P0 density at x off the boundary.
inline double single_layer_potential(const BoundaryMesh& bm, const Eigen::VectorXd& density, const Vec2& x) {
  double s = 0.0;
  for (int l = 0; l < bm.size(); ++l) s += density[l] * panel::log_integral(panel::frame(bm.panels[l], x));
  return -panel::kInv2Pi * s;
}

inline double distance_to_boundary(const BoundaryMesh& bm, const Vec2& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& e : bm.panels) d = std::min(d, panel::segment_distance(x, x, e.a, e.b));
  return d;
}

/// u^c(x) = D(uhat - u0)(x) - V(eps^{3/4} sigmahat - phi0)(x) for boundary densities
/// uhat, u0 (S1) and sigmahat, phi0 (P0).
inline double exterior_eval(const BoundaryMesh& bm, const Vec2& x, const Eigen::VectorXd& uhat,
                            const Eigen::VectorXd& sighat, const Eigen::VectorXd& u0, const Eigen::VectorXd& phi0,
                            double eps) {
  if (distance_to_boundary(bm, x) < 1e-12 * bm.diameter())
    throw ArgumentError("exterior_eval: point too close to the boundary");
  return double_layer_potential(bm, uhat - u0, x) -
         single_layer_potential(bm, std::pow(eps, 0.75) * sighat - phi0, x);
}

}  // namespace dpgbem
