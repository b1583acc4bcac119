#include <gtest/gtest.h>

#include <dpgbem/mesh.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace dpgbem;

namespace {

// Conformity, orientation and boundary-loop checks written directly against the raw
// vertex/triangle arrays.
void expect_valid(const Mesh& m, double perimeter, double area) {
  std::map<std::pair<int, int>, int> count;
  for (int t = 0; t < m.num_triangles(); ++t) {
    EXPECT_GT(m.signed_area(t), 0.0);
    const auto& v = m.triangle(t).v;
    for (int k = 0; k < 3; ++k) {
      const int a = v[(k + 1) % 3], b = v[(k + 2) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  int boundary = 0;
  for (const auto& [e, c] : count) {
    EXPECT_LE(c, 2);
    if (c == 1) ++boundary;
  }
  EXPECT_EQ(static_cast<int>(count.size()), m.num_edges());
  EXPECT_EQ(boundary, m.num_boundary_edges());
  // No hanging nodes: no vertex lies strictly inside an edge.
  for (const auto& [e, c] : count) {
    const Vec2 a = m.vertex(e.first), b = m.vertex(e.second);
    const Vec2 mid = 0.5 * (a + b);
    for (int v = 0; v < m.num_vertices(); ++v)
      ASSERT_GT((m.vertex(v) - mid).norm(), 1e-14) << "hanging node on edge " << e.first << "-" << e.second;
  }
  // Boundary loop: consecutive edges share endpoints, closes, counterclockwise (positive area).
  const auto& be = m.boundary_edges();
  double len = 0.0, shoelace = 0.0;
  for (std::size_t i = 0; i < be.size(); ++i) {
    const Edge& e = m.edge(be[i]);
    const Edge& next = m.edge(be[(i + 1) % be.size()]);
    EXPECT_EQ(e.v[1], next.v[0]);
    const Vec2 a = m.vertex(e.v[0]), b = m.vertex(e.v[1]);
    len += (b - a).norm();
    shoelace += 0.5 * (a.x() * b.y() - b.x() * a.y());
  }
  EXPECT_NEAR(len, perimeter, 1e-12);
  EXPECT_NEAR(shoelace, area, 1e-12);
  EXPECT_NEAR(m.total_area(), area, 1e-12 * area);
}

}  // namespace

TEST(InitialMesh, Square) {
  const Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  EXPECT_EQ(m.num_triangles(), 4);
  EXPECT_EQ(m.num_vertices(), 5);
  EXPECT_EQ(m.num_edges(), 8);
  const BoundaryMesh bm = boundary_mesh(m);
  EXPECT_EQ(bm.size(), 4);
  for (const auto& p : bm.panels) EXPECT_DOUBLE_EQ(p.length, 0.5);
  EXPECT_DOUBLE_EQ(bm.perimeter(), 2.0);
  EXPECT_NEAR(bm.diameter(), std::sqrt(2.0) / 2, 1e-15);
  expect_valid(m, 2.0, 0.25);
}

TEST(InitialMesh, LShape) {
  const Mesh m = build_initial_mesh(DomainSpec::LShape);
  EXPECT_EQ(m.num_triangles(), 12);
  EXPECT_EQ(m.num_vertices(), 11);
  EXPECT_EQ(m.num_edges(), 22);
  const BoundaryMesh bm = boundary_mesh(m);
  EXPECT_EQ(bm.size(), 8);
  for (const auto& p : bm.panels) EXPECT_DOUBLE_EQ(p.length, 0.25);
  EXPECT_DOUBLE_EQ(bm.perimeter(), 2.0);
  EXPECT_NEAR(bm.diameter(), std::sqrt(2.0) / 2, 1e-15);
  expect_valid(m, 2.0, 0.1875);
  // Reentrant corner at the origin, removed block is the second quadrant.
  bool has_origin = false;
  for (const auto& v : m.vertices()) has_origin |= v.norm() == 0.0;
  EXPECT_TRUE(has_origin);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto c = m.corners(t);
    const Vec2 centroid = (c[0] + c[1] + c[2]) / 3.0;
    EXPECT_FALSE(centroid.x() < 0 && centroid.y() > 0);
  }
}

TEST(InitialMesh, ParseDomain) {
  EXPECT_EQ(parse_domain("unit-square-scaled"), DomainSpec::UnitSquareScaled);
  EXPECT_EQ(parse_domain("l-shape"), DomainSpec::LShape);
  EXPECT_THROW(parse_domain("disk"), ConfigurationError);
}

TEST(Refine, MarkAllOnSquareGivesEight) {
  const Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  const std::vector<int> all{0, 1, 2, 3};
  const Mesh r = refine(m, all);
  EXPECT_EQ(r.num_triangles(), 8);
  expect_valid(r, 2.0, 0.25);
}

TEST(Refine, EmptyMarkIsIdentity) {
  const Mesh m = refine_uniform(build_initial_mesh(DomainSpec::LShape));
  const Mesh r = refine(m, std::vector<int>{});
  ASSERT_EQ(r.num_triangles(), m.num_triangles());
  EXPECT_EQ(r.vertices(), m.vertices());
  for (int t = 0; t < m.num_triangles(); ++t) EXPECT_EQ(r.triangle(t).v, m.triangle(t).v);
}

TEST(Refine, UniformDoublesTriangleCount) {
  Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  for (int level = 1; level <= 8; ++level) {
    m = refine_uniform(m);
    EXPECT_EQ(m.num_triangles(), 4 << level);
  }
  expect_valid(m, 2.0, 0.25);
}

TEST(Refine, OutOfRangeIndexThrows) {
  const Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  EXPECT_THROW(refine(m, std::vector<int>{4}), ArgumentError);
  EXPECT_THROW(refine(m, std::vector<int>{-1}), ArgumentError);
  EXPECT_THROW(refine(m, std::vector<int>{}, std::vector<int>{8}), ArgumentError);
}

TEST(Refine, MarkedEdgeIsBisected) {
  const Mesh m = build_initial_mesh(DomainSpec::LShape);
  const int e = m.boundary_edges()[3];
  const Vec2 mid = 0.5 * (m.vertex(m.edge(e).v[0]) + m.vertex(m.edge(e).v[1]));
  const Mesh r = refine(m, std::vector<int>{}, std::vector<int>{e});
  bool found = false;
  for (const auto& v : r.vertices()) found |= (v - mid).norm() < 1e-15;
  EXPECT_TRUE(found);
  expect_valid(r, 2.0, 0.1875);
}

TEST(Refine, RandomSequencesKeepInvariants) {
  std::mt19937 rng(7);
  for (DomainSpec d : {DomainSpec::UnitSquareScaled, DomainSpec::LShape}) {
    Mesh m = build_initial_mesh(d);
    const double area = m.total_area();
    const double c0 = m.shape_constant();
    for (int step = 0; step < 14; ++step) {
      std::vector<int> marked;
      std::uniform_int_distribution<int> pick(0, m.num_triangles() - 1);
      for (int k = 0; k < 1 + m.num_triangles() / 5; ++k) marked.push_back(pick(rng));
      const Mesh r = refine(m, marked);
      EXPECT_GT(r.num_triangles(), m.num_triangles());
      EXPECT_GE(r.num_vertices(), m.num_vertices());
      EXPECT_LE(r.shape_constant(), 4.0 * c0);
      EXPECT_NEAR(r.total_area(), area, 1e-12 * area);
      EXPECT_NEAR(boundary_mesh(r).perimeter(), 2.0, 1e-12);
      m = r;
    }
    expect_valid(m, 2.0, area);
  }
}

TEST(Refine, ChildrenPartitionParent) {
  const Mesh m = build_initial_mesh(DomainSpec::LShape);
  const Mesh r = refine(m, std::vector<int>{5});
  // Every child lies inside exactly one parent; child areas per parent sum to the parent area.
  std::vector<double> sum(m.num_triangles(), 0.0);
  for (int t = 0; t < r.num_triangles(); ++t) {
    const auto c = r.corners(t);
    const Vec2 g = (c[0] + c[1] + c[2]) / 3.0;
    int parent = -1;
    for (int s = 0; s < m.num_triangles(); ++s) {
      const auto p = m.corners(s);
      bool in = true;
      for (int k = 0; k < 3; ++k) {
        const Vec2 a = p[k], b = p[(k + 1) % 3];
        in &= (b.x() - a.x()) * (g.y() - a.y()) - (b.y() - a.y()) * (g.x() - a.x()) > 0;
      }
      if (in) parent = s;
    }
    ASSERT_GE(parent, 0);
    sum[parent] += r.area(t);
  }
  for (int s = 0; s < m.num_triangles(); ++s) EXPECT_NEAR(sum[s], m.area(s), 1e-12 * m.area(s));
}

TEST(BoundaryMesh, OrientationAndNormals) {
  const Mesh m = refine_uniform(refine_uniform(build_initial_mesh(DomainSpec::LShape)));
  const BoundaryMesh bm = boundary_mesh(m);
  for (int j = 0; j < bm.size(); ++j) {
    const auto& p = bm.panels[j];
    EXPECT_EQ(p.end_node, bm.panels[(j + 1) % bm.size()].start_node);
    EXPECT_NEAR(p.normal.dot(p.tangent), 0.0, 1e-15);
    // Outward: a point slightly along the normal lies outside every triangle.
    const Vec2 out = 0.5 * (p.a + p.b) + 1e-6 * p.normal;
    EXPECT_FALSE(out.x() > -0.25 && out.x() < 0.25 && out.y() > -0.25 && out.y() < 0.25 &&
                 !(out.x() < 0 && out.y() > 0));
  }
}

TEST(MeshDump, PlainTextFormat) {
  const Mesh m = build_initial_mesh(DomainSpec::UnitSquareScaled);
  std::ostringstream os;
  write_mesh(os, m);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  EXPECT_EQ(lines, 5 + 4);
  EXPECT_NE(os.str().find(" 2\n"), std::string::npos);
}
