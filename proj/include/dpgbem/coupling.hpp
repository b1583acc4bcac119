#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>
#ifdef DPGBEM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <cmath>
#include <string>
#include <vector>

#include "bem.hpp"
#include "dpg_local.hpp"
#include "fespace.hpp"
#include "mesh.hpp"
#include "problem.hpp"

namespace dpgbem {

/// Global indices of the interface unknowns: gamma0[i] is the uhat_a dof of boundary node i,
/// gamma_n[j] the sigmahat_a dof of boundary panel j (oriented by the outward normal).
struct TraceMaps {
  std::vector<int> gamma0;
  std::vector<int> gamma_n;

  TraceMaps() = default;
  TraceMaps(const BoundaryMesh& bm, const DofLayout& layout) {
    for (int v : bm.mesh_vertex) gamma0.push_back(layout.uhat_a(v));
    for (const auto& p : bm.panels) gamma_n.push_back(layout.sighat_a(p.mesh_edge));
  }

  /// Global dof of row/column i of the coupling matrix.
  int operator[](int i) const {
    const int n = static_cast<int>(gamma0.size());
    return i < n ? gamma0[i] : gamma_n[i - n];
  }
};

struct GlobalSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  DofLayout layout;
  TraceMaps traces;
  BoundaryMesh bmesh;
  BoundaryOperatorSet ops;
  Eigen::VectorXd u0;    // S1 interpolant on boundary nodes
  Eigen::VectorXd phi0;  // P0 projection on boundary panels
  double eps = 1.0;
  double beta = 1.0;
};

/// Discretized interface data.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> discretize_interface_data(const BoundaryMesh& bm,
                                                                            const ProblemData& problem) {
  return {interpolate_nodal(bm, problem.u0), project_piecewise_constant(bm, problem.phi0)};
}

/// A = sum_T scatter(beta B^T G^-1 B) + eps^-1/2 scatter(C), rhs likewise.
inline GlobalSystem assemble(const Mesh& mesh, double eps, double beta, const ProblemData& problem) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigurationError("assemble: eps must lie in (0, 1]");
  if (!(beta > 0.0)) throw ConfigurationError("assemble: beta must be positive");
  GlobalSystem sys;
  sys.eps = eps;
  sys.beta = beta;
  sys.layout = DofLayout(mesh);
  sys.bmesh = boundary_mesh(mesh);
  sys.traces = TraceMaps(sys.bmesh, sys.layout);
  const int ndof = sys.layout.total();
  sys.rhs = Eigen::VectorXd::Zero(ndof);

  const int nb = sys.bmesh.size();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_triangles()) * kLocalTrialDofs * kLocalTrialDofs +
                   4 * static_cast<std::size_t>(nb) * nb);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geo = ElementGeometry::from_mesh(mesh, t);
    const auto contrib = local_dpg_contribution(local_system(geo, eps, problem.f), beta);
    const auto dofs = local_dofs(mesh, sys.layout, t);
    for (int i = 0; i < kLocalTrialDofs; ++i) {
      sys.rhs[dofs[i]] += contrib.r[i];
      for (int k = 0; k < kLocalTrialDofs; ++k) triplets.emplace_back(dofs[i], dofs[k], contrib.S(i, k));
    }
  }

  sys.ops = assemble_boundary_operators(sys.bmesh);
  std::tie(sys.u0, sys.phi0) = discretize_interface_data(sys.bmesh, problem);
  const double scale = 1.0 / std::sqrt(eps);
  const Eigen::MatrixXd C = coupling_matrix(sys.ops, eps);
  for (int k = 0; k < 2 * nb; ++k)
    for (int i = 0; i < 2 * nb; ++i) triplets.emplace_back(sys.traces[i], sys.traces[k], scale * C(i, k));
  const Eigen::VectorXd rc = coupling_rhs(sys.ops, eps, sys.u0, sys.phi0);
  for (int i = 0; i < 2 * nb; ++i) sys.rhs[sys.traces[i]] += rc[i];

  sys.A.resize(ndof, ndof);
  sys.A.setFromTriplets(triplets.begin(), triplets.end());
  sys.A.makeCompressed();
  return sys;
}

enum class SolverKind { Direct, Krylov };

struct SolveReport {
  double residual = 0.0;  // ||A x - rhs|| / ||rhs|| (absolute if rhs = 0)
  int iterations = 0;     // refinement sweeps (direct) or Krylov iterations
  std::string method;
};

inline double relative_residual(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& rhs) {
  const double r = (A * x - rhs).norm();
  const double b = rhs.norm();
  return b > 0.0 ? r / b : r;
}

/// Sparse LU with partial pivoting (UMFPACK when available, otherwise Eigen's supernodal LU)
/// plus a few steps of iterative refinement; the Krylov variant runs restarted GMRES with an
/// incomplete-LU preconditioner.
inline std::pair<FieldVector, SolveReport> solve(const GlobalSystem& sys, SolverKind kind = SolverKind::Direct,
                                                 double tolerance = 1e-10) {
  SolveReport report;
  const int n = sys.layout.total();
  if (sys.rhs.norm() == 0.0) {
    report.method = "trivial";
    return {FieldVector(sys.layout, Eigen::VectorXd::Zero(n)), report};
  }
  Eigen::VectorXd x;
  if (kind == SolverKind::Direct) {
#ifdef DPGBEM_HAVE_UMFPACK
    report.method = "umfpack-lu";
    Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.A);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed", 1.0);
#else
    report.method = "sparse-lu";
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(sys.A);
    lu.factorize(sys.A);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage(), 1.0);
#endif
    x = lu.solve(sys.rhs);
    report.residual = relative_residual(sys.A, x, sys.rhs);
    for (int sweep = 0; sweep < 3 && report.residual > 1e-3 * tolerance; ++sweep) {
      x += lu.solve(Eigen::VectorXd(sys.rhs - sys.A * x));
      ++report.iterations;
      report.residual = relative_residual(sys.A, x, sys.rhs);
    }
  } else {
    report.method = "gmres";
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gmres;
    gmres.preconditioner().setDroptol(1e-6);
    gmres.preconditioner().setFillfactor(20);
    gmres.set_restart(200);
    gmres.setTolerance(1e-3 * tolerance);
    gmres.setMaxIterations(5000);
    gmres.compute(sys.A);
    x = gmres.solve(sys.rhs);
    report.iterations = static_cast<int>(gmres.iterations());
    report.residual = relative_residual(sys.A, x, sys.rhs);
  }
  if (!x.allFinite() || report.residual > tolerance)
    throw SolverError("linear solve did not reach the requested residual", report.residual);
  return {FieldVector(sys.layout, std::move(x)), report};
}

}  // namespace dpgbem
