#include <gtest/gtest.h>

#include <dpgbem/problems.hpp>
#include <dpgbem/special_functions.hpp>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <random>

using namespace dpgbem;

namespace {

// Points inside the L-shape (-1/4,1/4)^2 \ [-1/4,0]x[0,1/4].
bool in_lshape(const Vec2& x) {
  if (std::abs(x.x()) >= 0.25 || std::abs(x.y()) >= 0.25) return false;
  return !(x.x() <= 0 && x.y() >= 0);
}

std::vector<Vec2> random_points(DomainSpec d, int n, unsigned seed, double margin = 0.0) {
  std::mt19937 rng(seed);
  std::vector<Vec2> pts;
  if (d == DomainSpec::UnitSquareScaled) {
    std::uniform_real_distribution<double> u(margin, 0.5 - margin);
    while (static_cast<int>(pts.size()) < n) pts.emplace_back(u(rng), u(rng));
  } else {
    std::uniform_real_distribution<double> u(-0.25 + margin, 0.25 - margin);
    while (static_cast<int>(pts.size()) < n) {
      const Vec2 x(u(rng), u(rng));
      // keep the stencils away from the reentrant corner and the two reentrant edges
      const bool near_cut = (x.y() > 0 && x.x() < margin) || (x.x() < 0 && x.y() > -margin);
      if (in_lshape(x) && x.norm() > margin && !near_cut) pts.push_back(x);
    }
  }
  return pts;
}

// Fourth-order central differences with step h.
double fd_laplacian(const ScalarFunction& u, const Vec2& x, double h) {
  double s = 0;
  for (const Vec2& e : {Vec2(1, 0), Vec2(0, 1)})
    s += (-u(x + 2 * h * e) + 16 * u(x + h * e) - 30 * u(x) + 16 * u(x - h * e) - u(x - 2 * h * e)) / (12 * h * h);
  return s;
}

Vec2 fd_gradient(const ScalarFunction& u, const Vec2& x, double h) {
  Vec2 g;
  for (int c = 0; c < 2; ++c) {
    Vec2 e = Vec2::Zero();
    e[c] = h;
    g[c] = (-u(x + 2 * e) + 8 * u(x + e) - 8 * u(x - e) + u(x - 2 * e)) / (12 * h);
  }
  return g;
}

void check_manufactured(const ProblemData& p, const std::vector<Vec2>& pts) {
  ASSERT_TRUE(p.exact.has_value());
  const auto& ex = *p.exact;
  for (const Vec2& x : pts) {
    const double h = 0.01 * std::min(std::sqrt(p.eps), x.norm());
    const double u = ex.u(x);
    const double lap_fd = fd_laplacian(ex.u, x, h);
    const double scale = std::abs(u) + std::abs(p.f(x)) + p.eps * std::abs(ex.lap_u(x));
    EXPECT_NEAR(p.f(x), -p.eps * lap_fd + u, 1e-6 * scale) << p.name << " eps=" << p.eps << " at " << x.transpose();
    const Vec2 g = ex.grad_u(x), gfd = fd_gradient(ex.u, x, h);
    EXPECT_LE((g - gfd).norm(), 1e-6 * (g.norm() + std::abs(u) / std::sqrt(p.eps))) << p.name << " " << x.transpose();
  }
}

void check_exterior(const ProblemData& p, const std::vector<Vec2>& pts) {
  const auto& ex = *p.exact;
  for (const Vec2& x : pts) {
    const double scale = std::abs(ex.uc(x)) / x.squaredNorm();
    EXPECT_LE(std::abs(fd_laplacian(ex.uc, x, 1e-3)), 1e-6 * std::max(scale, 1.0)) << x.transpose();
    EXPECT_LE((ex.grad_uc(x) - fd_gradient(ex.uc, x, 1e-4)).norm(), 1e-8) << x.transpose();
  }
}

std::vector<Vec2> exterior_points(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> r(0.8, 3.0), a(0, 2 * std::numbers::pi);
  std::vector<Vec2> pts;
  for (int k = 0; k < 20; ++k) {
    const double rr = r(rng), aa = a(rng);
    pts.emplace_back(rr * std::cos(aa), rr * std::sin(aa));
  }
  return pts;
}

using Big = boost::multiprecision::cpp_bin_float_50;

// e^{-x} I_nu(x) from the power series summed in 50-digit arithmetic until the terms are negligible.
double bessel_oracle(double nu, double x) {
  const Big bx(x), bnu(nu), q = bx * bx / 4;
  Big term = boost::multiprecision::pow(bx / 2, bnu) / boost::math::tgamma(bnu + 1);
  Big sum = term;
  int m = 1;
  for (; m < 2000; ++m) {
    term *= q / (Big(m) * (Big(m) + bnu));
    sum += term;
    if (m > 60 && term < sum * Big("1e-45")) break;
  }
  EXPECT_LT(m, 2000);
  return static_cast<double>(sum * boost::multiprecision::exp(-bx));
}

}  // namespace

TEST(Examples, ParseAndName) {
  for (Example e : {Example::Smooth, Example::Singular, Example::Unknown}) EXPECT_EQ(parse_example(to_string(e)), e);
  EXPECT_THROW(parse_example("hard"), ConfigurationError);
  EXPECT_EQ(make_problem(Example::Singular, 0.1).domain, DomainSpec::LShape);
  EXPECT_EQ(make_problem(Example::Smooth, 0.1).domain, DomainSpec::UnitSquareScaled);
  for (double eps : {0.0, -1.0, 1.5}) {
    EXPECT_THROW(problem_smooth(eps), ConfigurationError);
    EXPECT_THROW(problem_singular(eps), ConfigurationError);
    EXPECT_THROW(problem_unknown(eps), ConfigurationError);
  }
}

TEST(Smooth, ExteriorValue) {
  const auto p = problem_smooth(1e-2);
  EXPECT_NEAR(p.exact->uc(Vec2(1, 1)), 0.15 / 1.125, 1e-15);
  EXPECT_NEAR(p.exact->uc(Vec2(1, 1)), 0.13333, 1e-5);
}

TEST(Smooth, DataConsistentWithEquation) {
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const auto p = problem_smooth(eps);
    check_manufactured(p, random_points(p.domain, eps == 1e-2 ? 50 : 100, 1));
  }
  check_exterior(problem_smooth(1e-2), exterior_points(2));
}

TEST(Smooth, JumpDataMatchesTraces) {
  const double eps = 1e-3;
  const auto p = problem_smooth(eps);
  const auto& ex = *p.exact;
  for (const Vec2& x : {Vec2(0.1, 0.0), Vec2(0.5, 0.3), Vec2(0.2, 0.5), Vec2(0.0, 0.45)}) {
    EXPECT_NEAR(p.u0(x), ex.u(x) - ex.uc(x), 1e-14 * std::abs(ex.u(x)) + 1e-15);
    const Vec2 n = x.y() == 0 ? Vec2(0, -1) : x.x() == 0.5 ? Vec2(1, 0) : x.y() == 0.5 ? Vec2(0, 1) : Vec2(-1, 0);
    EXPECT_NEAR(p.phi0(x, n), eps * ex.grad_u(x).dot(n) - ex.grad_uc(x).dot(n), 1e-12);
  }
}

TEST(Singular, SourceVanishesAndNormalized) {
  for (double eps : {1e-1, 1e-2, 1e-4}) {
    const auto p = problem_singular(eps);
    EXPECT_EQ(p.exact->u(Vec2(0, 0)), 0.0);
    double peak = 0;
    const int n = 400;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const Vec2 x(-0.25 + 0.5 * i / n, -0.25 + 0.5 * j / n);
        if (x.x() < 0 && x.y() > 0) continue;
        EXPECT_EQ(p.f(x), 0.0);
        peak = std::max(peak, std::abs(p.exact->u(x)));
      }
    EXPECT_GE(peak, 0.999) << eps;
    EXPECT_LE(peak, 1.0 + 1e-12) << eps;
    check_manufactured(p, random_points(p.domain, 50, 3, 0.03));
  }
  check_exterior(problem_singular(1e-1), exterior_points(4));
}

TEST(Singular, SmallEpsilonDoesNotOverflow) {
  const auto p = problem_singular(1e-8);
  for (const Vec2& x : random_points(DomainSpec::LShape, 100, 5)) {
    EXPECT_TRUE(std::isfinite(p.exact->u(x)));
    EXPECT_TRUE(p.exact->grad_u(x).allFinite());
  }
  // The radial factor concentrates at the largest radius; the maximum sits at the far corner.
  EXPECT_NEAR(p.exact->u(Vec2(0.25, -0.25)), 1.0, 1e-12);
  EXPECT_EQ(p.exact->u(Vec2(0.25, 0.0)), 0.0);  // e^{-1036} underflows
}

TEST(Unknown, Data) {
  const auto p = problem_unknown(1e-4);
  EXPECT_FALSE(p.exact.has_value());
  EXPECT_EQ(p.domain, DomainSpec::LShape);
  EXPECT_EQ(p.f(Vec2(0.15, 0.0)), 1.0);
  EXPECT_EQ(p.f(Vec2(0.15, 0.11)), 0.0);
  EXPECT_EQ(p.f(Vec2(0.15, 0.09)), 1.0);
  const Mesh m = build_initial_mesh(p.domain);
  const auto bm = boundary_mesh(m);
  for (const auto& e : bm.panels) {
    EXPECT_EQ(p.u0(e.a), 0.5);
    EXPECT_EQ(p.u0(0.5 * (e.a + e.b)), 0.5);
    EXPECT_EQ(p.phi0(e.a, e.normal), 0.0);
  }
}

TEST(Bessel, MatchesHighPrecisionSeries) {
  for (double nu : {2.0 / 3.0, 5.0 / 3.0, 0.0})
    for (double x : {0.1, 1.0, 5.0, 10.0, 30.0, 100.0}) {
      const double ref = bessel_oracle(nu, x);
      EXPECT_NEAR(bessel_I(nu, x), ref, 1e-10 * ref) << "nu=" << nu << " x=" << x;
    }
}

TEST(Bessel, ContinuousAcrossBranchSwitch) {
  const double nu = 2.0 / 3.0;
  const double below = bessel_I(nu, 30.0), above = bessel_I(nu, std::nextafter(30.0, 31.0));
  EXPECT_NEAR(below, above, 1e-9 * below);
}

TEST(Bessel, EdgeCasesAndAsymptote) {
  EXPECT_EQ(bessel_I(2.0 / 3.0, 0.0), 0.0);
  EXPECT_EQ(bessel_I(0.0, 0.0), 1.0);
  EXPECT_THROW(bessel_I(2.0 / 3.0, -1.0), ArgumentError);
  EXPECT_THROW(bessel_I(-0.5, 1.0), ArgumentError);
  EXPECT_THROW(bessel_I_derivative(2.0 / 3.0, 0.0), ArgumentError);
  for (double x : {1e-3, 0.5, 7.0, 29.9, 30.1, 250.0}) EXPECT_GT(bessel_I(2.0 / 3.0, x), 0.0);
  for (double x : {1e3, 1e5, 1e7}) {
    const double ratio = bessel_I(2.0 / 3.0, x) * std::sqrt(2 * std::numbers::pi * x);
    EXPECT_NEAR(ratio, 1.0, 0.1 / x);
  }
}

TEST(Bessel, DerivativeMatchesFiniteDifference) {
  const double nu = 2.0 / 3.0;
  for (double x : {0.3, 2.0, 12.0, 45.0}) {
    // d/dx [e^x * scaled] e^{-x} = scaled' + scaled
    const double h = 1e-5 * x;
    const double d = (bessel_I(nu, x + h) - bessel_I(nu, x - h)) / (2 * h) + bessel_I(nu, x);
    EXPECT_NEAR(bessel_I_derivative(nu, x), d, 1e-7 * std::abs(d)) << x;
  }
}
