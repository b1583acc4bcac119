#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "bem.hpp"
#include "coupling.hpp"
#include "dpg_local.hpp"
#include "fespace.hpp"
#include "mesh.hpp"
#include "problem.hpp"

namespace dpgbem {

struct EstimatorRecord {
  std::vector<double> omega;  // est_Omega(T) per triangle
  std::vector<double> gamma;  // est_Gamma(E) per boundary panel
  double omega_total = 0.0;   // sqrt of the sum of squares
  double gamma_total = 0.0;
};

struct ErrorRecord {
  double omega = 0.0;
  double gamma = 0.0;
  double uhat_a = 0.0;
  double uhat_b = 0.0;
  double sighat_a = 0.0;
  double sighat_b = 0.0;
};

struct LevelRecord {
  int level = 0;
  int num_triangles = 0;
  int num_dofs = 0;
  int num_boundary_panels = 0;
  double est_omega = 0.0;
  double est_gamma = 0.0;
  std::optional<ErrorRecord> errors;
  SolveReport solve;
  double wall_seconds = 0.0;
};

inline double sum_of_squares_root(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Per-triangle volume estimator.
inline std::vector<double> est_volume(const Mesh& mesh, double eps, const FieldVector& uh, const ScalarFunction& f) {
  std::vector<double> est(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto sys = local_system(ElementGeometry::from_mesh(mesh, t), eps, f);
    est[t] = std::sqrt(est_volume_squared(sys, uh.local(mesh, t)));
  }
  return est;
}

inline constexpr int kEstimatorEdgePoints = 4;

/// est_Gamma(E)^2 = eps^{-1/2} h(E) (||R1||^2_{L2(E)} + ||R2'||^2_{L2(E)}), R evaluated for the
/// densities u0 - gamma0 u_hp and phi0 - eps^{3/4} gamma_n u_hp.
inline std::vector<double> est_boundary(const BoundaryMesh& bm, double eps, const Eigen::VectorXd& trace_u,
                                        const Eigen::VectorXd& trace_flux, const Eigen::VectorXd& u0,
                                        const Eigen::VectorXd& phi0) {
  const SegmentRule rule = gauss_legendre(kEstimatorEdgePoints);
  const Eigen::VectorXd du = u0 - trace_u;
  const Eigen::VectorXd dphi = phi0 - std::pow(eps, 0.75) * trace_flux;
  const auto res = calderon_residual(bm, du, dphi, rule);
  std::vector<double> est(bm.size());
  const double scale = 1.0 / std::sqrt(eps);
  for (int j = 0; j < bm.size(); ++j) {
    const double h = bm.panels[j].length;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * (res[j][q][0] * res[j][q][0] + res[j][q][1] * res[j][q][1]);
    est[j] = std::sqrt(scale * h * h * s);
  }
  return est;
}

/// Boundary traces (gamma0 u_hp on boundary nodes, gamma_n u_hp on boundary panels).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> boundary_traces(const GlobalSystem& sys, const FieldVector& uh) {
  const int n = sys.bmesh.size();
  Eigen::VectorXd tu(n), tf(n);
  for (int i = 0; i < n; ++i) {
    tu[i] = uh.values()[sys.traces.gamma0[i]];
    tf[i] = uh.values()[sys.traces.gamma_n[i]];
  }
  return {tu, tf};
}

inline EstimatorRecord estimate(const Mesh& mesh, const GlobalSystem& sys, const FieldVector& uh,
                                const ProblemData& problem) {
  EstimatorRecord r;
  r.omega = est_volume(mesh, sys.eps, uh, problem.f);
  const auto [tu, tf] = boundary_traces(sys, uh);
  r.gamma = est_boundary(sys.bmesh, sys.eps, tu, tf, sys.u0, sys.phi0);
  r.omega_total = sum_of_squares_root(r.omega);
  r.gamma_total = sum_of_squares_root(r.gamma);
  return r;
}

struct MarkedSet {
  std::vector<int> triangles;
  std::vector<int> edges;  // indices into the indicator list for edges (boundary panels)
  bool empty() const { return triangles.empty() && edges.empty(); }
};

/// Doerfler marking over the merged list of triangle and edge indicators: the largest indicators
/// are taken in descending order until their squares reach theta times the combined total.
/// Ties are broken by (triangles first, lower index first) for determinism.
inline MarkedSet mark(const std::vector<double>& est_omega, const std::vector<double>& est_gamma, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigurationError("mark: theta must lie in (0, 1)");
  struct Item {
    double value;
    int kind;
    int index;
  };
  std::vector<Item> items;
  items.reserve(est_omega.size() + est_gamma.size());
  double total = 0.0;
  for (std::size_t i = 0; i < est_omega.size(); ++i) {
    items.push_back({est_omega[i] * est_omega[i], 0, static_cast<int>(i)});
    total += items.back().value;
  }
  for (std::size_t i = 0; i < est_gamma.size(); ++i) {
    items.push_back({est_gamma[i] * est_gamma[i], 1, static_cast<int>(i)});
    total += items.back().value;
  }
  MarkedSet m;
  if (total == 0.0) return m;
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.index < b.index;
  });
  double acc = 0.0;
  for (const auto& it : items) {
    if (acc >= theta * total) break;
    acc += it.value;
    (it.kind == 0 ? m.triangles : m.edges).push_back(it.index);
  }
  std::sort(m.triangles.begin(), m.triangles.end());
  std::sort(m.edges.begin(), m.edges.end());
  return m;
}

/// Error quantities against an exact solution (volume terms with a degree-12 rule).
inline ErrorRecord errors_known(const Mesh& mesh, const GlobalSystem& sys, const FieldVector& uh,
                                const ProblemData& problem) {
  if (!problem.exact) throw ConfigurationError("errors_known: problem '" + problem.name + "' has no exact solution");
  const ExactSolution& ex = *problem.exact;
  const double eps = sys.eps;
  const double e14 = std::pow(eps, 0.25);
  const TriangleRule rule = triangle_rule(12);

  Eigen::VectorXd ua(mesh.num_vertices()), ub(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    ua[v] = uh.uhat_a(v);
    ub[v] = uh.uhat_b(v);
  }
  Eigen::VectorXd sa(mesh.num_edges()), sb(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    sa[e] = uh.sighat_a(e);
    sb[e] = uh.sighat_b(e);
  }
  const RT0Field rta(mesh, sa), rtb(mesh, sb);

  double omega2 = 0.0, ua2 = 0.0, ub2 = 0.0, sa2 = 0.0, sb2 = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.corners(t);
    const double jac = 2.0 * mesh.area(t);
    const Vec2 sig_h(uh.sigma(t, 0), uh.sigma(t, 1));
    const Vec2 gua = p1_gradient(mesh, ua, t), gub = p1_gradient(mesh, ub, t);
    const double da = rta.divergence(t), db = rtb.divergence(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto [xi, eta] = rule.points[q];
      const Vec2 x = p[0] + xi * (p[1] - p[0]) + eta * (p[2] - p[0]);
      const double w = rule.weights[q] * jac;
      const double u = ex.u(x);
      const Vec2 gu = ex.grad_u(x);
      const Vec2 sigma = e14 * gu;
      const double rho = e14 * ex.lap_u(x);
      omega2 += w * ((u - uh.u(t)) * (u - uh.u(t)) + (sigma - sig_h).squaredNorm() +
                     eps * (rho - uh.rho(t)) * (rho - uh.rho(t)));
      const double ea = u - p1_value(mesh, ua, t, x), eb = u - p1_value(mesh, ub, t, x);
      ua2 += w * (ea * ea + std::sqrt(eps) * (gu - gua).squaredNorm());
      ub2 += w * (eb * eb + std::sqrt(eps) * (gu - gub).squaredNorm());
      sa2 += w * ((sigma - rta.value(t, x)).squaredNorm() + eps * (rho - da) * (rho - da));
      sb2 += w * ((sigma - rtb.value(t, x)).squaredNorm() + eps * (rho - db) * (rho - db));
    }
  }

  // Boundary: u0 + u^c = u and phi0 + d_n u^c = eps d_n u on Gamma.
  const SegmentRule srule = gauss_legendre(8);
  const auto [tu, tf] = boundary_traces(sys, uh);
  const double e34 = std::pow(eps, 0.75);
  double gamma2 = 0.0;
  for (int j = 0; j < sys.bmesh.size(); ++j) {
    const auto& e = sys.bmesh.panels[j];
    const double slope = (tu[e.end_node] - tu[e.start_node]) / e.length;
    double s = 0.0;
    for (std::size_t q = 0; q < srule.size(); ++q) {
      const Vec2 x = e.a + srule.points[q] * (e.b - e.a);
      const Vec2 gu = ex.grad_u(x);
      const double r1 = slope - gu.dot(e.tangent);
      const double r2 = e34 * tf[j] - eps * gu.dot(e.normal);
      s += srule.weights[q] * (r1 * r1 + r2 * r2);
    }
    gamma2 += e.length * e.length * s;
  }

  ErrorRecord r;
  r.omega = std::sqrt(omega2);
  r.gamma = std::sqrt(gamma2 / std::sqrt(eps));
  r.uhat_a = std::sqrt(ua2);
  r.uhat_b = std::sqrt(ub2);
  r.sighat_a = std::sqrt(sa2);
  r.sighat_b = std::sqrt(sb2);
  return r;
}

struct AdaptiveOptions {
  double theta = 0.5;
  double beta = 1.0;
  int max_triangles = 20000;
  bool uniform = false;
  SolverKind solver = SolverKind::Direct;
  bool compute_errors = true;  // only used when the problem has an exact solution
};

/// Receives each level as soon as it is complete; the mesh and solution are valid only during the call.
using LevelObserver = std::function<void(const LevelRecord&, const Mesh&, const GlobalSystem&, const FieldVector&)>;

/// assemble -> solve -> estimate -> mark -> refine until #T exceeds max_triangles.
/// Marked boundary panels are bisected directly, which refines their adjacent triangle.
inline std::vector<LevelRecord> adaptive_loop(const ProblemData& problem, const AdaptiveOptions& opt,
                                              const LevelObserver& observer = {}) {
  if (!(opt.theta > 0.0 && opt.theta < 1.0)) throw ConfigurationError("theta must lie in (0, 1)");
  if (!(opt.beta > 0.0)) throw ConfigurationError("beta must be positive");
  std::vector<LevelRecord> levels;
  Mesh mesh = build_initial_mesh(problem.domain);
  for (int level = 0;; ++level) {
    const auto start = std::chrono::steady_clock::now();
    const GlobalSystem sys = assemble(mesh, problem.eps, opt.beta, problem);
    auto [uh, report] = solve(sys, opt.solver);
    const EstimatorRecord est = estimate(mesh, sys, uh, problem);
    LevelRecord rec;
    rec.level = level;
    rec.num_triangles = mesh.num_triangles();
    rec.num_dofs = sys.layout.total();
    rec.num_boundary_panels = sys.bmesh.size();
    rec.est_omega = est.omega_total;
    rec.est_gamma = est.gamma_total;
    rec.solve = report;
    if (opt.compute_errors && problem.exact) rec.errors = errors_known(mesh, sys, uh, problem);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    levels.push_back(rec);
    if (observer) observer(rec, mesh, sys, uh);
    if (mesh.num_triangles() > opt.max_triangles) break;

    if (opt.uniform) {
      mesh = refine_uniform(mesh);
      continue;
    }
    const MarkedSet marked = mark(est.omega, est.gamma, opt.theta);
    if (marked.empty()) break;
    double chosen = 0.0;
    for (int t : marked.triangles) chosen += est.omega[t] * est.omega[t];
    for (int j : marked.edges) chosen += est.gamma[j] * est.gamma[j];
    const double total = est.omega_total * est.omega_total + est.gamma_total * est.gamma_total;
    if (chosen < opt.theta * total * (1.0 - 1e-12)) throw InternalError("marking violates the Doerfler bound");
    std::vector<int> edges;
    for (int j : marked.edges) edges.push_back(sys.bmesh.panels[j].mesh_edge);
    mesh = refine(mesh, marked.triangles, edges);
  }
  return levels;
}

}  // namespace dpgbem
