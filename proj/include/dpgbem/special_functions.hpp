#pragma once

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace dpgbem {

/// Exponentially scaled modified Bessel function of the first kind, e^{-x} I_nu(x), for
/// nu >= 0 and x >= 0. Power series up to x = 30, large-argument expansion beyond.
inline double bessel_I(double nu, double x) {
  if (!(x >= 0.0)) throw ArgumentError("bessel_I: argument must be nonnegative");
  if (nu < 0.0) throw ArgumentError("bessel_I: order must be nonnegative");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (x <= 30.0) {
    // All terms are positive, so summing in order is stable; the scaling is folded into the first term.
    const double q = 0.25 * x * x;
    double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) - x);
    double sum = term;
    for (int m = 1; m < 500; ++m) {
      term *= q / (m * (m + nu));
      sum += term;
      if (term < 1e-17 * sum && m > q) break;
    }
    return sum;
  }
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

/// Derivative of the scaled function: d/dx [e^{-x} I_nu(x)] + e^{-x} I_nu(x) = e^{-x} I_nu'(x),
/// using I_nu' = I_{nu+1} + (nu/x) I_nu.
inline double bessel_I_derivative(double nu, double x) {
  if (!(x > 0.0)) throw ArgumentError("bessel_I_derivative: argument must be positive");
  return bessel_I(nu + 1.0, x) + nu / x * bessel_I(nu, x);
}

}  // namespace dpgbem
