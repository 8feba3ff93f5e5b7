#pragma once
// Piecewise-linear Dirichlet eigenproblem for the Laplace-Beltrami operator on a
// TriMesh, with one constant metric per triangle (average of its vertices).

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gapkit/domain.hpp"

namespace gapkit {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Operators {
  SparseMatrix K, M;              // interior degrees of freedom only
  std::vector<int> dof;           // vertex -> dof, -1 on the boundary
  std::vector<int> vertex;        // dof -> vertex
  double mass_total = 0.0;        // sum of all entries of the full mass matrix
  std::shared_ptr<const TriMesh> mesh;
};

struct SpectralError : std::runtime_error {
  double residual;
  SpectralError(const std::string& what, double r) : std::runtime_error(what), residual(r) {}
};

struct SpectralSolution {
  std::vector<double> lambda;                 // ascending
  std::vector<Eigen::VectorXd> modes;         // nodal values on all vertices, M-normalised
  std::vector<double> residuals;              // |K u - lambda M u| / (lambda |M u|)
  double rayleigh_error = 0.0;                // relative, for u1
  bool multiplicity_risk = false;             // lambda2 - lambda1 below the solver tolerance
  bool degenerate_23 = false;                 // lambda2 ~ lambda3, reported only
  int iterations = 0;
  double h = 0.0;
  std::size_t vertex_count = 0, interior_count = 0;
  std::shared_ptr<const TriMesh> mesh;

  double gap() const { return lambda.at(1) - lambda.at(0); }
  /// v = log u1 on interior vertices, NaN on the boundary.
  Eigen::VectorXd log_u1() const {
    Eigen::VectorXd v(modes[0].size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v(i) = mesh->boundary[i] ? std::numeric_limits<double>::quiet_NaN() : std::log(modes[0](i));
    return v;
  }
};

/// Element stiffness of the linear triangle p0 p1 p2 under the constant metric G.
inline Eigen::Matrix3d element_stiffness(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                         const Eigen::Vector2d& p2, const Eigen::Matrix2d& G) {
  Eigen::Matrix2d J;
  J.col(0) = p1 - p0;
  J.col(1) = p2 - p0;
  const double detJ = J.determinant();
  const double detG = G.determinant();
  if (!(detG > 0.0) || !(G(0, 0) > 0.0)) throw std::domain_error("element_stiffness: singular triangle metric");
  if (detJ == 0.0) throw std::domain_error("element_stiffness: degenerate triangle");
  // parameter gradients of the barycentric functions
  Eigen::Matrix<double, 2, 3> grad;
  const Eigen::Matrix2d Jinv_t = J.inverse().transpose();
  grad.col(1) = Jinv_t.col(0);
  grad.col(2) = Jinv_t.col(1);
  grad.col(0) = -grad.col(1) - grad.col(2);
  const double area = 0.5 * std::abs(detJ) * std::sqrt(detG);
  return area * grad.transpose() * G.inverse() * grad;
}

inline Eigen::Matrix3d element_mass(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                                    const Eigen::Matrix2d& G) {
  const Eigen::Vector2d e1 = p1 - p0, e2 = p2 - p0;
  const double area = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x()) * std::sqrt(G.determinant());
  Eigen::Matrix3d m = Eigen::Matrix3d::Constant(area / 12.0);
  m.diagonal().setConstant(area / 6.0);
  return m;
}

inline Operators assemble(std::shared_ptr<const TriMesh> mesh) {
  Operators ops;
  ops.mesh = mesh;
  const std::size_t n = mesh->vertex_count();
  ops.dof.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i)
    if (!mesh->boundary[i]) {
      ops.dof[i] = static_cast<int>(ops.vertex.size());
      ops.vertex.push_back(static_cast<int>(i));
    }
  const int ndof = static_cast<int>(ops.vertex.size());
  if (ndof == 0) throw std::invalid_argument("assemble: mesh has no interior vertex");
  std::vector<Eigen::Triplet<double>> tk, tm;
  for (const auto& t : mesh->triangles) {
    const Eigen::Matrix2d G = (mesh->metric[t[0]] + mesh->metric[t[1]] + mesh->metric[t[2]]) / 3.0;
    const auto& p = mesh->param;
    const Eigen::Matrix3d ke = element_stiffness(p[t[0]], p[t[1]], p[t[2]], G);
    const Eigen::Matrix3d me = element_mass(p[t[0]], p[t[1]], p[t[2]], G);
    ops.mass_total += me.sum();
    for (int a = 0; a < 3; ++a) {
      const int ra = ops.dof[t[a]];
      if (ra < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int cb = ops.dof[t[b]];
        if (cb < 0) continue;
        tk.emplace_back(ra, cb, ke(a, b));
        tm.emplace_back(ra, cb, me(a, b));
      }
    }
  }
  ops.K.resize(ndof, ndof);
  ops.M.resize(ndof, ndof);
  ops.K.setFromTriplets(tk.begin(), tk.end());
  ops.M.setFromTriplets(tm.begin(), tm.end());
  return ops;
}

inline Operators assemble(const TriMesh& mesh) { return assemble(std::make_shared<const TriMesh>(mesh)); }

/// k smallest eigenpairs of K u = lambda M u by shift-invert block subspace
/// iteration (shift 0, K is positive definite after Dirichlet elimination)
/// with Rayleigh-Ritz, from a fixed deterministic start block.
inline SpectralSolution solve_dirichlet(const Operators& ops, int k, double tol = 1e-10, int max_iter = 500) {
  if (k < 2) throw std::invalid_argument("solve_dirichlet: k must be at least 2");
  const Eigen::Index n = ops.K.rows();
  if (n < 10 * k) throw std::invalid_argument("solve_dirichlet: fewer than 10k interior degrees of freedom");
  const int p = std::min<Eigen::Index>(n, std::max(2 * k, k + 6));
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(ops.K);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("solve_dirichlet: stiffness factorisation failed");

  Eigen::MatrixXd X(n, p);
  X.col(0).setOnes();
  for (int j = 1; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = std::cos(0.7548776662466927 * (j + 1) * (i + 1) + 0.3 * j);
  Eigen::VectorXd lam(p);
  Eigen::MatrixXd V;
  std::vector<double> res(k, INFINITY);
  int it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::MatrixXd Y = ldlt.solve(ops.M * X);
    // Rayleigh-Ritz on span(Y)
    const Eigen::MatrixXd Kr = Y.transpose() * (ops.K * Y);
    const Eigen::MatrixXd Mr = Y.transpose() * (ops.M * Y);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (Kr + Kr.transpose()),
                                                                  0.5 * (Mr + Mr.transpose()));
    if (ges.info() != Eigen::Success) throw std::runtime_error("solve_dirichlet: Rayleigh-Ritz failed");
    lam = ges.eigenvalues();
    V = Y * ges.eigenvectors();  // M-orthonormal columns
    X = V;
    bool done = true;
    for (int j = 0; j < k; ++j) {
      const Eigen::VectorXd Mu = ops.M * V.col(j);
      res[j] = (ops.K * V.col(j) - lam(j) * Mu).norm() / (lam(j) * Mu.norm());
      if (!(res[j] < tol)) done = false;
    }
    if (done) break;
  }
  const double worst = *std::max_element(res.begin(), res.end());
  if (!(worst < 1e-8))
    throw SpectralError("solve_dirichlet: no convergence, residual " + std::to_string(worst), worst);

  SpectralSolution sol;
  sol.mesh = ops.mesh;
  sol.iterations = it + 1;
  sol.h = ops.mesh->h;
  sol.vertex_count = ops.mesh->vertex_count();
  sol.interior_count = static_cast<std::size_t>(n);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd u = V.col(j);
    const double nrm = std::sqrt(u.dot(ops.M * u));
    u /= nrm;
    if (u.sum() < 0.0) u = -u;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sol.vertex_count));
    for (Eigen::Index i = 0; i < n; ++i) full(ops.vertex[i]) = u(i);
    sol.lambda.push_back(lam(j));
    sol.modes.push_back(std::move(full));
    sol.residuals.push_back(res[j]);
  }
  {
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = sol.modes[0](ops.vertex[i]);
    const double rq = u.dot(ops.K * u) / u.dot(ops.M * u);
    sol.rayleigh_error = std::abs(rq - sol.lambda[0]) / sol.lambda[0];
  }
  const double solver_tol = 1e-8 * sol.lambda[0];
  sol.multiplicity_risk = !(sol.lambda[1] - sol.lambda[0] > solver_tol);
  if (p > 2) sol.degenerate_23 = std::abs(lam(2) - lam(1)) < 1e-3 * lam(1);
  return sol;
}

/// Largest and smallest interior values of u1; u1 must be positive inside.
inline std::pair<double, double> interior_range(const SpectralSolution& s) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < s.vertex_count; ++i)
    if (!s.mesh->boundary[i]) lo = std::min(lo, s.modes[0](i)), hi = std::max(hi, s.modes[0](i));
  return {lo, hi};
}

}  // namespace gapkit
