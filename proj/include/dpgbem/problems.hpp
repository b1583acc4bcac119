#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "mesh.hpp"
#include "problem.hpp"
#include "special_functions.hpp"

namespace dpgbem {

enum class Example { Smooth, Singular, Unknown };

inline std::string to_string(Example e) {
  switch (e) {
    case Example::Smooth: return "smooth";
    case Example::Singular: return "singular";
    case Example::Unknown: return "unknown";
  }
  return "?";
}

inline Example parse_example(const std::string& s) {
  if (s == "smooth") return Example::Smooth;
  if (s == "singular") return Example::Singular;
  if (s == "unknown") return Example::Unknown;
  throw ConfigurationError("unknown example '" + s + "'");
}

namespace detail {

inline void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigurationError("epsilon must lie in (0, 1]");
}

/// Harmonic exterior field 0.1 (x + y - a1 - a2) / |x - a|^2 with its pole at a.
struct ExteriorField {
  Vec2 pole;
  double value(const Vec2& x) const {
    const Vec2 d = x - pole;
    return 0.1 * (d.x() + d.y()) / d.squaredNorm();
  }
  Vec2 gradient(const Vec2& x) const {
    const Vec2 d = x - pole;
    const double r2 = d.squaredNorm();
    const double r4 = r2 * r2;
    return 0.1 / r4 * Vec2(d.y() * d.y() - d.x() * d.x() - 2.0 * d.x() * d.y(),
                           d.x() * d.x() - d.y() * d.y() - 2.0 * d.x() * d.y());
  }
};

/// Fills f, u0, phi0 and the exact callbacks from u, grad u, lap u and the exterior field.
inline void complete_manufactured(ProblemData& p, ScalarFunction u, VectorFunction grad_u, ScalarFunction lap_u,
                                  ExteriorField ext) {
  const double eps = p.eps;
  ExactSolution ex;
  ex.u = u;
  ex.grad_u = grad_u;
  ex.lap_u = lap_u;
  ex.uc = [ext](const Vec2& x) { return ext.value(x); };
  ex.grad_uc = [ext](const Vec2& x) { return ext.gradient(x); };
  p.u0 = [u, ext](const Vec2& x) { return u(x) - ext.value(x); };
  p.phi0 = [grad_u, ext, eps](const Vec2& x, const Vec2& n) {
    return eps * grad_u(x).dot(n) - ext.gradient(x).dot(n);
  };
  p.exact = std::move(ex);
}

}  // namespace detail

/// Smooth solution with boundary layers on (0,1/2)^2:
///   u = 8 (x^3 (1 + 4y^2) + sin(4 pi x^2)) + 2 cos(pi y)(x + y) E(x, y),
///   E = e^{-4x/s} + e^{-2(1-x)/s} + e^{-6y/s} + e^{-3(1-2y)/s},  s = sqrt(eps).
inline ProblemData problem_smooth(double eps) {
  detail::check_eps(eps);
  using std::numbers::pi;
  const double s = std::sqrt(eps);
  struct Layer {
    double e1, e2, e3, e4;
  };
  auto layer = [s](const Vec2& x) {
    return Layer{std::exp(-4.0 * x.x() / s), std::exp(-2.0 * (1.0 - x.x()) / s), std::exp(-6.0 * x.y() / s),
                 std::exp(-3.0 * (1.0 - 2.0 * x.y()) / s)};
  };
  auto u = [layer](const Vec2& p) {
    const double x = p.x(), y = p.y();
    const Layer e = layer(p);
    return 8.0 * (x * x * x * (1.0 + 4.0 * y * y) + std::sin(4.0 * pi * x * x)) +
           2.0 * std::cos(pi * y) * (x + y) * (e.e1 + e.e2 + e.e3 + e.e4);
  };
  auto grad_u = [layer, s](const Vec2& p) {
    const double x = p.x(), y = p.y();
    const Layer e = layer(p);
    const double E = e.e1 + e.e2 + e.e3 + e.e4;
    const Vec2 gP(3.0 * x * x * (1.0 + 4.0 * y * y) + 8.0 * pi * x * std::cos(4.0 * pi * x * x), 8.0 * x * x * x * y);
    const double Q = 2.0 * std::cos(pi * y) * (x + y);
    const Vec2 gQ(2.0 * std::cos(pi * y), -2.0 * pi * std::sin(pi * y) * (x + y) + 2.0 * std::cos(pi * y));
    const Vec2 gE((-4.0 * e.e1 + 2.0 * e.e2) / s, (-6.0 * e.e3 + 6.0 * e.e4) / s);
    return Vec2(8.0 * gP + E * gQ + Q * gE);
  };
  auto lap_u = [layer, s](const Vec2& p) {
    const double x = p.x(), y = p.y();
    const Layer e = layer(p);
    const double E = e.e1 + e.e2 + e.e3 + e.e4;
    const double lapP = 6.0 * x * (1.0 + 4.0 * y * y) + 8.0 * pi * std::cos(4.0 * pi * x * x) -
                        64.0 * pi * pi * x * x * std::sin(4.0 * pi * x * x) + 8.0 * x * x * x;
    const double Q = 2.0 * std::cos(pi * y) * (x + y);
    const Vec2 gQ(2.0 * std::cos(pi * y), -2.0 * pi * std::sin(pi * y) * (x + y) + 2.0 * std::cos(pi * y));
    const double lapQ = -2.0 * pi * pi * std::cos(pi * y) * (x + y) - 4.0 * pi * std::sin(pi * y);
    const Vec2 gE((-4.0 * e.e1 + 2.0 * e.e2) / s, (-6.0 * e.e3 + 6.0 * e.e4) / s);
    const double lapE = (16.0 * e.e1 + 4.0 * e.e2 + 36.0 * e.e3 + 36.0 * e.e4) / (s * s);
    return 8.0 * lapP + E * lapQ + 2.0 * gQ.dot(gE) + Q * lapE;
  };
  ProblemData p;
  p.name = "smooth";
  p.domain = DomainSpec::UnitSquareScaled;
  p.eps = eps;
  p.f = [u, lap_u, eps](const Vec2& x) { return -eps * lap_u(x) + u(x); };
  detail::complete_manufactured(p, u, grad_u, lap_u, detail::ExteriorField{Vec2(0.25, 0.25)});
  return p;
}

/// Corner singularity on the L-shape: u = C I_{2/3}(r/sqrt(eps)) cos(2 phi/3), phi in [-pi, pi/2],
/// normalized to max |u| = 1; f = 0.
inline ProblemData problem_singular(double eps) {
  detail::check_eps(eps);
  using std::numbers::pi;
  constexpr double nu = 2.0 / 3.0;
  const double s = std::sqrt(eps);
  auto polar = [](const Vec2& x) {
    double phi = std::atan2(x.y(), x.x());
    if (phi > 0.5 * pi) phi -= 2.0 * pi;
    return std::array<double, 2>{x.norm(), phi};
  };
  // Work with e^{(r - r_ref)/s} e^{-r/s} I(r/s) so that nothing overflows for small eps.
  const double r_ref = std::sqrt(2.0) / 4.0;
  auto radial = [s, r_ref](double r) { return std::exp((r - r_ref) / s) * bessel_I(nu, r / s); };
  double peak = 0.0;
  {
    const Mesh m0 = build_initial_mesh(DomainSpec::LShape);
    const BoundaryMesh bm = boundary_mesh(m0);
    constexpr int kSamples = 2000;
    for (const auto& e : bm.panels)
      for (int k = 0; k <= kSamples; ++k) {
        const Vec2 x = e.a + (static_cast<double>(k) / kSamples) * (e.b - e.a);
        const auto [r, phi] = polar(x);
        peak = std::max(peak, radial(r) * std::cos(nu * phi));
      }
  }
  auto u = [polar, radial, peak](const Vec2& x) {
    const auto [r, phi] = polar(x);
    return radial(r) * std::cos(nu * phi) / peak;
  };
  auto grad_u = [polar, radial, peak, s, r_ref](const Vec2& x) -> Vec2 {
    const auto [r, phi] = polar(x);
    if (r == 0.0) return Vec2::Zero();
    const double g = radial(r);
    const double dg = std::exp((r - r_ref) / s) * bessel_I_derivative(nu, r / s) / s;
    const Vec2 er(std::cos(phi), std::sin(phi));
    const Vec2 ephi(-std::sin(phi), std::cos(phi));
    return (dg * std::cos(nu * phi) * er - g * nu / r * std::sin(nu * phi) * ephi) / peak;
  };
  auto lap_u = [u, eps](const Vec2& x) { return u(x) / eps; };
  ProblemData p;
  p.name = "singular";
  p.domain = DomainSpec::LShape;
  p.eps = eps;
  p.f = [](const Vec2&) { return 0.0; };
  detail::complete_manufactured(p, u, grad_u, lap_u, detail::ExteriorField{Vec2(0.125, 0.0)});
  return p;
}

/// Piecewise constant source on a disk, constant jump data; no exact solution.
inline ProblemData problem_unknown(double eps) {
  detail::check_eps(eps);
  ProblemData p;
  p.name = "unknown";
  p.domain = DomainSpec::LShape;
  p.eps = eps;
  p.f = [](const Vec2& x) {
    const double dx = x.x() - 0.15;
    return dx * dx + x.y() * x.y() < 0.01 ? 1.0 : 0.0;
  };
  p.u0 = [](const Vec2&) { return 0.5; };
  p.phi0 = [](const Vec2&, const Vec2&) { return 0.0; };
  return p;
}

inline ProblemData make_problem(Example e, double eps) {
  switch (e) {
    case Example::Smooth: return problem_smooth(eps);
    case Example::Singular: return problem_singular(eps);
    case Example::Unknown: return problem_unknown(eps);
  }
  throw ConfigurationError("unknown example");
}

}  // namespace dpgbem
