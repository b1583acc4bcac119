#pragma once

#include <functional>
#include <optional>
#include <string>

#include "fespace.hpp"
#include "mesh.hpp"

namespace dpgbem {

/// Exact interior solution u and exterior harmonic u^c, with derivatives.
struct ExactSolution {
  ScalarFunction u;
  VectorFunction grad_u;
  ScalarFunction lap_u;
  ScalarFunction uc;
  VectorFunction grad_uc;
};

/// Data of the transmission problem
///   -eps lap u + u = f in Omega,  -lap u^c = 0 outside,
///   u - u^c = u0,  eps du/dn - du^c/dn = phi0 on Gamma.
struct ProblemData {
  std::string name;
  DomainSpec domain = DomainSpec::UnitSquareScaled;
  double eps = 1.0;
  ScalarFunction f;
  ScalarFunction u0;
  /// phi0(x, n) with n the outward unit normal at x.
  std::function<double(const Vec2&, const Vec2&)> phi0;
  std::optional<ExactSolution> exact;
};

}  // namespace dpgbem
