#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

#include "mesh.hpp"
#include "quadrature.hpp"

namespace dpgbem {

/// The seven trial fields of the ultra-weak formulation.
enum class Field { U, Sigma, Rho, UHatA, UHatB, SigmaHatA, SigmaHatB };

/// Global numbering of the lowest-order trial space.
///
/// Blocks in order: u (P0, one per triangle), sigma (2 per triangle), rho (P0), uhat_a (S1, one
/// per vertex), uhat_b (S1, interior vertices only: boundary vertices reuse the uhat_a dof),
/// sigmahat_a and sigmahat_b (P0 on edges, value of sigma . n_E w.r.t. the global edge normal).
class DofLayout {
 public:
  DofLayout() = default;
  explicit DofLayout(const Mesh& mesh)
      : nt_(mesh.num_triangles()), nv_(mesh.num_vertices()), ne_(mesh.num_edges()) {
    off_u_ = 0;
    off_sigma_ = off_u_ + nt_;
    off_rho_ = off_sigma_ + 2 * nt_;
    off_uhat_a_ = off_rho_ + nt_;
    off_uhat_b_ = off_uhat_a_ + nv_;
    uhat_b_.resize(nv_);
    int next = off_uhat_b_;
    for (int v = 0; v < nv_; ++v)
      uhat_b_[v] = mesh.is_boundary_vertex(v) ? off_uhat_a_ + v : next++;
    num_boundary_vertices_ = off_uhat_b_ + nv_ - next;
    off_sighat_a_ = next;
    off_sighat_b_ = off_sighat_a_ + ne_;
    total_ = off_sighat_b_ + ne_;
  }

  int total() const { return total_; }
  int num_triangles() const { return nt_; }
  int num_vertices() const { return nv_; }
  int num_edges() const { return ne_; }
  int num_boundary_vertices() const { return num_boundary_vertices_; }

  int u(int t) const { return off_u_ + t; }
  int sigma(int t, int c) const { return off_sigma_ + 2 * t + c; }
  int rho(int t) const { return off_rho_ + t; }
  int uhat_a(int v) const { return off_uhat_a_ + v; }
  int uhat_b(int v) const { return uhat_b_[v]; }
  int sighat_a(int e) const { return off_sighat_a_ + e; }
  int sighat_b(int e) const { return off_sighat_b_ + e; }

  /// True for the dofs of u, sigma, rho (element-local, discontinuous).
  bool is_field_dof(int i) const { return i < off_uhat_a_; }

  friend bool operator==(const DofLayout&, const DofLayout&) = default;

 private:
  int nt_ = 0, nv_ = 0, ne_ = 0;
  int off_u_ = 0, off_sigma_ = 0, off_rho_ = 0, off_uhat_a_ = 0, off_uhat_b_ = 0;
  int off_sighat_a_ = 0, off_sighat_b_ = 0, total_ = 0;
  int num_boundary_vertices_ = 0;
  std::vector<int> uhat_b_;
};

/// Number of local trial dofs per triangle: u, sigma_x, sigma_y, rho, 3 uhat_a, 3 uhat_b,
/// 3 sigmahat_a, 3 sigmahat_b.
inline constexpr int kLocalTrialDofs = 16;

namespace local_trial {
inline constexpr int u = 0;
inline constexpr int sigma = 1;   // +c
inline constexpr int rho = 3;
inline constexpr int uhat_a = 4;  // +local vertex
inline constexpr int uhat_b = 7;
inline constexpr int sighat_a = 10;  // +local edge
inline constexpr int sighat_b = 13;
}  // namespace local_trial

inline std::array<int, kLocalTrialDofs> local_dofs(const Mesh& mesh, const DofLayout& layout, int t) {
  std::array<int, kLocalTrialDofs> d{};
  const auto& v = mesh.triangle(t).v;
  d[local_trial::u] = layout.u(t);
  d[local_trial::sigma] = layout.sigma(t, 0);
  d[local_trial::sigma + 1] = layout.sigma(t, 1);
  d[local_trial::rho] = layout.rho(t);
  for (int k = 0; k < 3; ++k) {
    d[local_trial::uhat_a + k] = layout.uhat_a(v[k]);
    d[local_trial::uhat_b + k] = layout.uhat_b(v[k]);
    d[local_trial::sighat_a + k] = layout.sighat_a(mesh.triangle_edge(t, k));
    d[local_trial::sighat_b + k] = layout.sighat_b(mesh.triangle_edge(t, k));
  }
  return d;
}

/// Coefficients of a discrete trial function u_hp = (u, sigma, rho, uhat_a, uhat_b,
/// sigmahat_a, sigmahat_b).
class FieldVector {
 public:
  FieldVector() = default;
  explicit FieldVector(DofLayout layout)
      : layout_(std::move(layout)), values_(Eigen::VectorXd::Zero(layout_.total())) {}
  FieldVector(DofLayout layout, Eigen::VectorXd values)
      : layout_(std::move(layout)), values_(std::move(values)) {
    if (values_.size() != layout_.total()) throw ArgumentError("FieldVector: size mismatch");
  }

  const DofLayout& layout() const { return layout_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double& u(int t) { return values_[layout_.u(t)]; }
  double u(int t) const { return values_[layout_.u(t)]; }
  double& sigma(int t, int c) { return values_[layout_.sigma(t, c)]; }
  double sigma(int t, int c) const { return values_[layout_.sigma(t, c)]; }
  double& rho(int t) { return values_[layout_.rho(t)]; }
  double rho(int t) const { return values_[layout_.rho(t)]; }
  double& uhat_a(int v) { return values_[layout_.uhat_a(v)]; }
  double uhat_a(int v) const { return values_[layout_.uhat_a(v)]; }
  double& uhat_b(int v) { return values_[layout_.uhat_b(v)]; }
  double uhat_b(int v) const { return values_[layout_.uhat_b(v)]; }
  double& sighat_a(int e) { return values_[layout_.sighat_a(e)]; }
  double sighat_a(int e) const { return values_[layout_.sighat_a(e)]; }
  double& sighat_b(int e) { return values_[layout_.sighat_b(e)]; }
  double sighat_b(int e) const { return values_[layout_.sighat_b(e)]; }

  Eigen::Matrix<double, kLocalTrialDofs, 1> local(const Mesh& mesh, int t) const {
    Eigen::Matrix<double, kLocalTrialDofs, 1> c;
    const auto d = local_dofs(mesh, layout_, t);
    for (int i = 0; i < kLocalTrialDofs; ++i) c[i] = values_[d[i]];
    return c;
  }

 private:
  DofLayout layout_;
  Eigen::VectorXd values_;
};

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// S1 nodal interpolant on all mesh vertices.
inline Eigen::VectorXd interpolate_nodal(const Mesh& mesh, const ScalarFunction& g) {
  Eigen::VectorXd c(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) c[v] = g(mesh.vertex(v));
  return c;
}

/// S1 nodal interpolant on the boundary nodes.
inline Eigen::VectorXd interpolate_nodal(const BoundaryMesh& bm, const ScalarFunction& g) {
  Eigen::VectorXd c(bm.nodes.size());
  for (std::size_t i = 0; i < bm.nodes.size(); ++i) c[i] = g(bm.nodes[i]);
  return c;
}

/// Mean value of g on each boundary panel; g may depend on the panel's outward normal.
inline Eigen::VectorXd project_piecewise_constant(
    const BoundaryMesh& bm, const std::function<double(const Vec2&, const Vec2&)>& g,
    int npoints = 8) {
  const SegmentRule rule = gauss_legendre(npoints);
  Eigen::VectorXd c(bm.size());
  for (int j = 0; j < bm.size(); ++j) {
    const auto& p = bm.panels[j];
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * g(p.a + rule.points[q] * (p.b - p.a), p.normal);
    c[j] = s;
  }
  return c;
}

/// Mean value of g on each mesh edge.
inline Eigen::VectorXd project_piecewise_constant(const Mesh& mesh, const std::vector<int>& edges,
                                                  const ScalarFunction& g, int npoints = 8) {
  const SegmentRule rule = gauss_legendre(npoints);
  Eigen::VectorXd c(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Vec2 a = mesh.vertex(mesh.edge(edges[i]).v[0]);
    const Vec2 b = mesh.vertex(mesh.edge(edges[i]).v[1]);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * g(a + rule.points[q] * (b - a));
    c[i] = s;
  }
  return c;
}

/// Mean value of g on each triangle.
inline Eigen::VectorXd project_piecewise_constant(const Mesh& mesh, const ScalarFunction& g,
                                                  int degree = 8) {
  const TriangleRule rule = triangle_rule(degree);
  Eigen::VectorXd c(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.corners(t);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto [x, y] = rule.points[q];
      s += rule.weights[q] * g(p[0] + x * (p[1] - p[0]) + y * (p[2] - p[0]));
    }
    c[t] = 2.0 * s;
  }
  return c;
}

/// Element-wise lowest-order Raviart-Thomas field with prescribed constant normal traces.
///
/// On triangle T with outward normal flux q_k on local edge k, the field is
/// sum_k q_k |E_k| / (2|T|) (x - P_k), P_k the vertex opposite edge k.
class RT0Field {
 public:
  RT0Field(const Mesh& mesh, Eigen::VectorXd edge_fluxes)
      : mesh_(&mesh), fluxes_(std::move(edge_fluxes)) {
    if (fluxes_.size() != mesh.num_edges()) throw ArgumentError("rt0_reconstruct: one flux per edge required");
  }

  Vec2 value(int t, const Vec2& x) const {
    const auto p = mesh_->corners(t);
    const double area = mesh_->area(t);
    Vec2 r = Vec2::Zero();
    for (int k = 0; k < 3; ++k) r += coefficient(t, k) * edge_len(t, k) / (2.0 * area) * (x - p[k]);
    return r;
  }
  double divergence(int t) const {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d += coefficient(t, k) * edge_len(t, k);
    return d / mesh_->area(t);
  }

 private:
  double coefficient(int t, int k) const {
    return mesh_->edge_sign(t, k) * fluxes_[mesh_->triangle_edge(t, k)];
  }
  double edge_len(int t, int k) const { return mesh_->edge_length(mesh_->triangle_edge(t, k)); }

  const Mesh* mesh_;
  Eigen::VectorXd fluxes_;
};

inline RT0Field rt0_reconstruct(const Mesh& mesh, Eigen::VectorXd edge_fluxes) {
  return RT0Field(mesh, std::move(edge_fluxes));
}

/// Conforming P1 function from vertex values.
inline double p1_value(const Mesh& mesh, const Eigen::VectorXd& nodal, int t, const Vec2& x) {
  const auto p = mesh.corners(t);
  const auto& v = mesh.triangle(t).v;
  const double a2 = 2.0 * mesh.signed_area(t);
  double r = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2& b = p[(k + 1) % 3];
    const Vec2& c = p[(k + 2) % 3];
    const double lambda = ((b.x() - x.x()) * (c.y() - x.y()) - (c.x() - x.x()) * (b.y() - x.y())) / a2;
    r += lambda * nodal[v[k]];
  }
  return r;
}

inline Vec2 p1_gradient(const Mesh& mesh, const Eigen::VectorXd& nodal, int t) {
  const auto p = mesh.corners(t);
  const auto& v = mesh.triangle(t).v;
  const double a2 = 2.0 * mesh.signed_area(t);
  Vec2 g = Vec2::Zero();
  for (int k = 0; k < 3; ++k) {
    const Vec2& b = p[(k + 1) % 3];
    const Vec2& c = p[(k + 2) % 3];
    g += nodal[v[k]] * Vec2(b.y() - c.y(), c.x() - b.x()) / a2;
  }
  return g;
}

}  // namespace dpgbem
