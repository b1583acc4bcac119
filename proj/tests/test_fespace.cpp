#include <gtest/gtest.h>

#include <dpgbem/fespace.hpp>

#include <cmath>
#include <random>
#include <set>

using namespace dpgbem;

namespace {

Mesh refined(DomainSpec d, int levels) {
  Mesh m = build_initial_mesh(d);
  for (int i = 0; i < levels; ++i) m = refine_uniform(m);
  return m;
}

}  // namespace

TEST(DofLayout, InitialSquareHas38Dofs) {
  const Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  const DofLayout l(m);
  // 4 nT + (nV + nV - nBV) + 2 nE with nT=4, nV=5, nBV=4, nE=8
  EXPECT_EQ(l.total(), 4 * 4 + (5 + 5 - 4) + 2 * 8);
  EXPECT_EQ(l.total(), 38);
  EXPECT_EQ(l.num_boundary_vertices(), 4);
}

TEST(DofLayout, EnumerationIsABijection) {
  const Mesh m = refine(build_initial_mesh(DomainSpec::LShape), std::vector<int>{0, 3, 7});
  const DofLayout l(m);
  std::set<int> seen;
  for (int t = 0; t < m.num_triangles(); ++t) {
    seen.insert(l.u(t));
    seen.insert(l.sigma(t, 0));
    seen.insert(l.sigma(t, 1));
    seen.insert(l.rho(t));
  }
  int bv = 0;
  for (int v = 0; v < m.num_vertices(); ++v) {
    seen.insert(l.uhat_a(v));
    seen.insert(l.uhat_b(v));
    if (m.is_boundary_vertex(v)) {
      ++bv;
      EXPECT_EQ(l.uhat_a(v), l.uhat_b(v));
    } else {
      EXPECT_NE(l.uhat_a(v), l.uhat_b(v));
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    seen.insert(l.sighat_a(e));
    seen.insert(l.sighat_b(e));
  }
  EXPECT_EQ(static_cast<int>(seen.size()), l.total());
  EXPECT_EQ(*seen.begin(), 0);
  EXPECT_EQ(*seen.rbegin(), l.total() - 1);
  EXPECT_EQ(l.total(), 4 * m.num_triangles() + 2 * m.num_vertices() - bv + 2 * m.num_edges());
}

TEST(DofLayout, StableAndMonotone) {
  Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  int previous = 0;
  for (int i = 0; i < 5; ++i) {
    EXPECT_TRUE(DofLayout(m) == DofLayout(m));
    EXPECT_GT(DofLayout(m).total(), previous);
    previous = DofLayout(m).total();
    m = refine(m, std::vector<int>{0});
  }
}

TEST(FieldVector, AccessorsAddressLayout) {
  const Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  FieldVector f{DofLayout(m)};
  f.sigma(2, 1) = 3.0;
  EXPECT_EQ(f.values()[f.layout().sigma(2, 1)], 3.0);
  f.uhat_a(0) = 5.0;  // boundary vertex: shared with uhat_b
  EXPECT_EQ(f.uhat_b(0), 5.0);
  EXPECT_THROW(FieldVector(DofLayout(m), Eigen::VectorXd::Zero(3)), ArgumentError);
}

TEST(Interpolation, ConstantsAreReproduced) {
  const Mesh m = refined(DomainSpec::LShape, 2);
  const BoundaryMesh bm = boundary_mesh(m);
  auto c = [](const Vec2&) { return 2.5; };
  EXPECT_TRUE((interpolate_nodal(m, c).array() == 2.5).all());
  EXPECT_TRUE((interpolate_nodal(bm, c).array() == 2.5).all());
  EXPECT_TRUE((project_piecewise_constant(m, c).array() - 2.5).abs().maxCoeff() < 1e-14);
  EXPECT_TRUE((project_piecewise_constant(bm, [](const Vec2&, const Vec2&) { return 2.5; }).array() - 2.5)
                  .abs()
                  .maxCoeff() < 1e-14);
}

TEST(Interpolation, MeanOfLinearOnEdge) {
  const double h = 0.5;
  const Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  const BoundaryMesh bm = boundary_mesh(m);
  for (int j = 0; j < bm.size(); ++j) {
    const auto& p = bm.panels[j];
    if (p.a.y() == 0.0 && p.b.y() == 0.0) {
      const auto c = project_piecewise_constant(bm, [](const Vec2& x, const Vec2&) { return x.x(); });
      EXPECT_NEAR(c[j], h / 2, 1e-15);
    }
  }
}

TEST(Interpolation, ProjectionErrorDecaysLinearly) {
  // L2 error of the P0 projection of sin(x)+y on the boundary; reference integral by 20-point Gauss.
  auto g = [](const Vec2& x) { return std::sin(8 * x.x()) + x.y(); };
  const SegmentRule fine = gauss_legendre(20);
  std::vector<double> errors;
  Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  for (int level = 0; level < 6; ++level) {
    const BoundaryMesh bm = boundary_mesh(m);
    const auto c = project_piecewise_constant(bm, [&](const Vec2& x, const Vec2&) { return g(x); });
    double e2 = 0.0;
    for (int j = 0; j < bm.size(); ++j) {
      const auto& p = bm.panels[j];
      for (std::size_t q = 0; q < fine.size(); ++q) {
        const double d = g(p.a + fine.points[q] * (p.b - p.a)) - c[j];
        e2 += p.length * fine.weights[q] * d * d;
      }
    }
    errors.push_back(std::sqrt(e2));
    m = refine_uniform(refine_uniform(m));
  }
  for (std::size_t i = 2; i < errors.size(); ++i) EXPECT_NEAR(errors[i - 1] / errors[i], 2.0, 0.2);
}

TEST(RT0, ConstantFieldIsReproduced) {
  const Mesh m = refine(refined(DomainSpec::LShape, 1), std::vector<int>{1, 4});
  const Vec2 q(1.0, 0.0);
  Eigen::VectorXd flux(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) flux[e] = q.dot(m.edge_normal(e));
  const RT0Field f = rt0_reconstruct(m, flux);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto c = m.corners(t);
    for (const Vec2& x : {c[0], Vec2((c[0] + c[1] + c[2]) / 3.0), Vec2(0.5 * (c[1] + c[2]))}) {
      EXPECT_NEAR((f.value(t, x) - q).norm(), 0.0, 1e-12);
    }
    EXPECT_NEAR(f.divergence(t), 0.0, 1e-11);
  }
}

TEST(RT0, LinearFieldHasDivergenceTwo) {
  const Mesh m = refined(DomainSpec::UnitSquareScaled, 3);
  Eigen::VectorXd flux(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2 mid = 0.5 * (m.vertex(m.edge(e).v[0]) + m.vertex(m.edge(e).v[1]));
    flux[e] = mid.dot(m.edge_normal(e));  // (x, y) . n is constant along a straight edge
  }
  const RT0Field f = rt0_reconstruct(m, flux);
  for (int t = 0; t < m.num_triangles(); ++t) {
    EXPECT_NEAR(f.divergence(t), 2.0, 1e-11);
    const auto c = m.corners(t);
    EXPECT_NEAR((f.value(t, c[1]) - c[1]).norm(), 0.0, 1e-12);
  }
}

TEST(RT0, NormalTracesMatchRandomFluxes) {
  const Mesh m = refine(refined(DomainSpec::LShape, 1), std::vector<int>{2, 9});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  Eigen::VectorXd flux(m.num_edges());
  for (auto& x : flux) x = dist(rng);
  const RT0Field f = rt0_reconstruct(m, flux);
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) {
      const int e = m.triangle_edge(t, k);
      const Vec2 a = m.vertex(m.edge(e).v[0]), b = m.vertex(m.edge(e).v[1]);
      for (double s : {0.2, 0.5, 0.9}) {
        const Vec2 x = a + s * (b - a);
        EXPECT_NEAR(f.value(t, x).dot(m.edge_normal(e)), flux[e], 1e-12);
      }
    }
}

TEST(P1, ValueAndGradientOfLinearFunction) {
  const Mesh m = refined(DomainSpec::LShape, 1);
  auto g = [](const Vec2& x) { return 1.0 + 2.0 * x.x() - 3.0 * x.y(); };
  const Eigen::VectorXd nodal = interpolate_nodal(m, g);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto c = m.corners(t);
    const Vec2 x = 0.2 * c[0] + 0.3 * c[1] + 0.5 * c[2];
    EXPECT_NEAR(p1_value(m, nodal, t, x), g(x), 1e-14);
    EXPECT_NEAR((p1_gradient(m, nodal, t) - Vec2(2.0, -3.0)).norm(), 0.0, 1e-12);
  }
}
