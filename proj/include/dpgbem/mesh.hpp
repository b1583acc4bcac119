#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace dpgbem {

using Vec2 = Eigen::Vector2d;

enum class DomainSpec { UnitSquareScaled, LShape };

inline std::string to_string(DomainSpec d) {
  return d == DomainSpec::UnitSquareScaled ? "unit-square-scaled" : "l-shape";
}

inline DomainSpec parse_domain(const std::string& name) {
  if (name == "unit-square-scaled" || name == "square") return DomainSpec::UnitSquareScaled;
  if (name == "l-shape" || name == "lshape") return DomainSpec::LShape;
  throw ConfigurationError("unknown domain '" + name + "'");
}

/// Triangle with its newest-vertex-bisection bookkeeping.
///
/// Vertices are counterclockwise. The refinement edge is (v[0], v[1]); v[2] is the newest
/// vertex. Local edge k is the edge opposite v[k], running from v[k+1] to v[k+2].
struct Triangle {
  std::array<int, 3> v{};
  int generation = 0;
};

/// Unique mesh edge. `v` runs counterclockwise w.r.t. `tri[0]`, the lower-numbered
/// neighbour; the global normal points from tri[0] into tri[1] (outward on the boundary).
struct Edge {
  std::array<int, 2> v{};
  std::array<int, 2> tri{-1, -1};

  bool on_boundary() const { return tri[1] < 0; }
};

class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles)
      : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    build_topology();
  }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_boundary_edges() const { return static_cast<int>(boundary_edges_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vec2& vertex(int i) const { return vertices_[i]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const Edge& edge(int e) const { return edges_[e]; }

  /// Global index of local edge k (opposite local vertex k) of triangle t.
  int triangle_edge(int t, int k) const { return tri_edges_[t][k]; }
  /// +1 if the global normal of local edge k equals the outward normal of t, else -1.
  int edge_sign(int t, int k) const { return edges_[tri_edges_[t][k]].tri[0] == t ? 1 : -1; }

  /// Boundary edges in counterclockwise order along the boundary.
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }
  /// Boundary vertices, boundary_vertices()[i] is the start of boundary_edges()[i].
  const std::vector<int>& boundary_vertices() const { return boundary_vertices_; }
  bool is_boundary_vertex(int v) const { return on_boundary_[v]; }

  std::array<Vec2, 3> corners(int t) const {
    const auto& v = triangles_[t].v;
    return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
  }
  double signed_area(int t) const {
    const auto c = corners(t);
    const Vec2 a = c[1] - c[0], b = c[2] - c[0];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  double area(int t) const { return std::abs(signed_area(t)); }
  double diameter(int t) const {
    const auto c = corners(t);
    return std::max({(c[0] - c[1]).norm(), (c[1] - c[2]).norm(), (c[2] - c[0]).norm()});
  }
  double edge_length(int e) const { return (vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]]).norm(); }
  /// Global unit normal of edge e.
  Vec2 edge_normal(int e) const {
    const Vec2 t = vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]];
    return Vec2(t.y(), -t.x()) / t.norm();
  }
  /// max_T diam(T)^2 / |T|
  double shape_constant() const {
    double c = 0.0;
    for (int t = 0; t < num_triangles(); ++t) c = std::max(c, diameter(t) * diameter(t) / area(t));
    return c;
  }
  double total_area() const {
    double a = 0.0;
    for (int t = 0; t < num_triangles(); ++t) a += area(t);
    return a;
  }

  static std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }

 private:
  void build_topology() {
    const int nt = num_triangles();
    edges_.clear();
    tri_edges_.assign(nt, {-1, -1, -1});
    std::unordered_map<std::uint64_t, int> lookup;
    lookup.reserve(3 * nt);
    for (int t = 0; t < nt; ++t) {
      if (signed_area(t) <= 0.0)
        throw ArgumentError("mesh: triangle " + std::to_string(t) + " is not positively oriented");
      const auto& v = triangles_[t].v;
      for (int k = 0; k < 3; ++k) {
        const int a = v[(k + 1) % 3], b = v[(k + 2) % 3];
        const auto [it, inserted] = lookup.try_emplace(edge_key(a, b), num_edges());
        if (inserted) {
          edges_.push_back(Edge{{a, b}, {t, -1}});
        } else {
          Edge& e = edges_[it->second];
          if (e.tri[1] >= 0) throw ArgumentError("mesh: edge shared by more than two triangles");
          if (e.v[0] != b || e.v[1] != a)
            throw ArgumentError("mesh: inconsistent orientation across an edge");
          e.tri[1] = t;
        }
        tri_edges_[t][k] = it->second;
      }
    }
    // Boundary loop.
    on_boundary_.assign(num_vertices(), false);
    std::unordered_map<int, int> next;
    int start = -1;
    for (int e = 0; e < num_edges(); ++e) {
      if (!edges_[e].on_boundary()) continue;
      const int a = edges_[e].v[0];
      if (!next.emplace(a, e).second) throw ArgumentError("mesh: boundary is not a simple loop");
      on_boundary_[a] = on_boundary_[edges_[e].v[1]] = true;
      if (start < 0 || a < edges_[start].v[0]) start = e;
    }
    boundary_edges_.clear();
    boundary_vertices_.clear();
    if (start < 0) return;
    int e = start;
    do {
      boundary_edges_.push_back(e);
      boundary_vertices_.push_back(edges_[e].v[0]);
      const auto it = next.find(edges_[e].v[1]);
      if (it == next.end()) throw ArgumentError("mesh: open boundary");
      e = it->second;
    } while (e != start && boundary_edges_.size() <= next.size());
    if (boundary_edges_.size() != next.size())
      throw ArgumentError("mesh: boundary must be a single closed loop");
  }

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<int> boundary_edges_;
  std::vector<int> boundary_vertices_;
  std::vector<bool> on_boundary_;
};

namespace detail {

// Splits an axis-aligned square into four triangles through its center; the refinement edge
// of each is the square side, the newest vertex the center.
inline void add_crossed_square(std::vector<Vec2>& verts, std::vector<Triangle>& tris,
                               std::array<int, 4> ccw_corners, Vec2 center) {
  const int c = static_cast<int>(verts.size());
  verts.push_back(center);
  for (int k = 0; k < 4; ++k) tris.push_back({{ccw_corners[k], ccw_corners[(k + 1) % 4], c}, 0});
}

}  // namespace detail

/// Initial meshes. Square: (0,1/2)^2 crossed by both diagonals (4 triangles).
/// L-shape: (-1/4,1/4)^2 without [-1/4,0]x[0,1/4], three crossed quarter squares (12 triangles).
inline Mesh build_initial_mesh(DomainSpec spec) {
  std::vector<Vec2> v;
  std::vector<Triangle> t;
  switch (spec) {
    case DomainSpec::UnitSquareScaled:
      v = {Vec2(0, 0), Vec2(0.5, 0), Vec2(0.5, 0.5), Vec2(0, 0.5)};
      detail::add_crossed_square(v, t, {0, 1, 2, 3}, Vec2(0.25, 0.25));
      break;
    case DomainSpec::LShape: {
      const double q = 0.25;
      v = {Vec2(0, 0),   Vec2(q, 0),  Vec2(q, q),   Vec2(0, q),
           Vec2(q, -q),  Vec2(0, -q), Vec2(-q, -q), Vec2(-q, 0)};
      detail::add_crossed_square(v, t, {0, 1, 2, 3}, Vec2(q / 2, q / 2));
      detail::add_crossed_square(v, t, {5, 4, 1, 0}, Vec2(q / 2, -q / 2));
      detail::add_crossed_square(v, t, {6, 5, 0, 7}, Vec2(-q / 2, -q / 2));
      break;
    }
    default:
      throw ConfigurationError("build_initial_mesh: unknown domain");
  }
  return Mesh(std::move(v), std::move(t));
}

/// Newest-vertex bisection. Every marked triangle is bisected at least once and every
/// marked edge is halved; closure bisections restore conformity.
inline Mesh refine(const Mesh& mesh, std::span<const int> marked_triangles,
                   std::span<const int> marked_edges = {}) {
  const int nt = mesh.num_triangles();
  std::vector<char> edge_marked(mesh.num_edges(), 0);
  for (int t : marked_triangles) {
    if (t < 0 || t >= nt) throw ArgumentError("refine: triangle index out of range");
    edge_marked[mesh.triangle_edge(t, 2)] = 1;
  }
  for (int e : marked_edges) {
    if (e < 0 || e >= mesh.num_edges()) throw ArgumentError("refine: edge index out of range");
    edge_marked[e] = 1;
  }
  if (std::none_of(edge_marked.begin(), edge_marked.end(), [](char c) { return c != 0; }))
    return mesh;

  // Closure: a triangle with any marked edge must have its refinement edge marked.
  for (bool changed = true; changed;) {
    changed = false;
    for (int t = 0; t < nt; ++t) {
      const int ref = mesh.triangle_edge(t, 2);
      if (edge_marked[ref]) continue;
      if (edge_marked[mesh.triangle_edge(t, 0)] || edge_marked[mesh.triangle_edge(t, 1)]) {
        edge_marked[ref] = 1;
        changed = true;
      }
    }
  }

  std::vector<Vec2> verts = mesh.vertices();
  std::unordered_map<std::uint64_t, int> midpoint;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!edge_marked[e]) continue;
    const auto& ed = mesh.edge(e);
    midpoint.emplace(Mesh::edge_key(ed.v[0], ed.v[1]), static_cast<int>(verts.size()));
    verts.push_back(0.5 * (mesh.vertex(ed.v[0]) + mesh.vertex(ed.v[1])));
  }

  std::vector<Triangle> tris;
  tris.reserve(2 * nt);
  std::function<void(const Triangle&)> bisect = [&](const Triangle& tr) {
    const auto it = midpoint.find(Mesh::edge_key(tr.v[0], tr.v[1]));
    if (it == midpoint.end()) {
      tris.push_back(tr);
      return;
    }
    const int m = it->second;
    bisect(Triangle{{tr.v[2], tr.v[0], m}, tr.generation + 1});
    bisect(Triangle{{tr.v[1], tr.v[2], m}, tr.generation + 1});
  };
  for (const auto& tr : mesh.triangles()) bisect(tr);
  return Mesh(std::move(verts), std::move(tris));
}

inline Mesh refine_uniform(const Mesh& mesh) {
  std::vector<int> all(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) all[t] = t;
  return refine(mesh, all);
}

/// One straight boundary panel, oriented counterclockwise along the boundary.
struct BoundaryPanel {
  Vec2 a, b;          // start, end
  Vec2 tangent;       // unit, a -> b
  Vec2 normal;        // unit outward normal
  double length = 0;
  int start_node = 0;
  int end_node = 0;
  int mesh_edge = -1;
};

/// Boundary triangulation induced by the skeleton. Node i is the start of panel i.
struct BoundaryMesh {
  std::vector<Vec2> nodes;
  std::vector<int> mesh_vertex;   // volume-mesh vertex of each node
  std::vector<BoundaryPanel> panels;

  int size() const { return static_cast<int>(panels.size()); }
  double perimeter() const {
    double s = 0.0;
    for (const auto& p : panels) s += p.length;
    return s;
  }
  double diameter() const {
    double d = 0.0;
    for (const auto& x : nodes)
      for (const auto& y : nodes) d = std::max(d, (x - y).norm());
    return d;
  }
};

inline BoundaryMesh boundary_mesh(const Mesh& mesh) {
  BoundaryMesh bm;
  const auto& be = mesh.boundary_edges();
  const int n = static_cast<int>(be.size());
  for (int i = 0; i < n; ++i) {
    const int v = mesh.boundary_vertices()[i];
    bm.nodes.push_back(mesh.vertex(v));
    bm.mesh_vertex.push_back(v);
  }
  for (int i = 0; i < n; ++i) {
    const auto& ed = mesh.edge(be[i]);
    BoundaryPanel p;
    p.a = mesh.vertex(ed.v[0]);
    p.b = mesh.vertex(ed.v[1]);
    p.length = (p.b - p.a).norm();
    p.tangent = (p.b - p.a) / p.length;
    p.normal = Vec2(p.tangent.y(), -p.tangent.x());
    p.start_node = i;
    p.end_node = (i + 1) % n;
    p.mesh_edge = be[i];
    bm.panels.push_back(p);
  }
  return bm;
}

/// Plain-text dump: "x y" per vertex, then "i j k r" per triangle (r = refinement-edge local
/// index, i.e. the local index of the newest vertex).
inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os.precision(17);
  for (const auto& v : mesh.vertices()) os << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : mesh.triangles()) os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << " 2\n";
}

}  // namespace dpgbem
