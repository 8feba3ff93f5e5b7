#pragma once
// Checks of log-concavity tensor inequalities, barrier inequalities and
// fundamental-gap lower bounds on computed eigenfunctions.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gapkit/conditions.hpp"
#include "gapkit/domain.hpp"
#include "gapkit/recovery.hpp"

namespace gapkit {

/// Largest eigenvalue of the symmetric form A relative to the metric g, with a
/// g-unit eigenvector. Ties go to the direction of smaller parameter angle.
struct DirectedEigen {
  double max = 0.0, min = 0.0;
  Eigen::Vector2d e1, e2;  // g-orthonormal, e1 maximises A(X, X)
  bool tie = false;
};

inline DirectedEigen directed_eigen(const Eigen::Matrix2d& A, const Eigen::Matrix2d& g) {
  if (!(g(0, 0) > 0.0 && g.determinant() > 0.0)) throw std::domain_error("directed_eigen: metric is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(A, g);
  DirectedEigen d;
  d.min = es.eigenvalues()(0);
  d.max = es.eigenvalues()(1);
  d.e1 = es.eigenvectors().col(1);
  d.e2 = es.eigenvectors().col(0);
  const double scale = std::max({std::abs(d.max), std::abs(d.min), 1e-300});
  if (d.max - d.min <= 1e-12 * scale) {
    d.tie = true;
    d.e1 = Eigen::Vector2d(1.0, 0.0) / std::sqrt(g(0, 0));
    Eigen::Vector2d t(-g(0, 1), g(0, 0));  // g-orthogonal to (1, 0)
    d.e2 = t / std::sqrt(t.dot(g * t));
  } else {
    // fix orientation deterministically: parameter angle in [0, pi)
    if (d.e1.y() < 0.0 || (d.e1.y() == 0.0 && d.e1.x() < 0.0)) d.e1 = -d.e1;
    if (d.e2.y() < 0.0 || (d.e2.y() == 0.0 && d.e2.x() < 0.0)) d.e2 = -d.e2;
  }
  return d;
}

// ---- log-concavity ----------------------------------------------------------

struct ConcavityReport {
  double C = 0.0;
  double tau_c = 0.0;
  double delta = 0.0, h = 0.0;
  std::vector<Eigen::Vector2d> points;
  std::vector<double> max_eig;  // of Hess v + (C + kappa/2) g relative to g
  double global_max = -INFINITY;
  Eigen::Vector2d argmax = Eigen::Vector2d::Zero(), direction = Eigen::Vector2d::Zero();
  bool verdict = false;
  // constraints on C, reported side by side
  bool C_ge_minus_kappa_min = false;      // C >= -kappa_min
  bool C_ge_minus_half_kappa = false;     // C >= -kappa/2 at every grid point
  // constant-curvature mode (round spheres only)
  bool sphere_mode = false;
  double hess_max = -INFINITY;            // max eigenvalue of Hess v over the grid
  Eigen::Vector2d hess_argmax = Eigen::Vector2d::Zero(), hess_direction = Eigen::Vector2d::Zero();
  double wang_bound = NAN;                // n - sqrt(n^2 + 4 lambda1), n = 2 (unit-sphere scaling)
  bool wang_verdict = false;
  double wang_corrected_bound = NAN;      // (n - sqrt(n^2 + 4 lambda1)) / 2
  bool wang_corrected_verdict = false;
};

/// Discretisation budget 5 (h + delta)/r_in times the Hessian scale lambda1/2
/// (the mean Hessian eigenvalue of v where u1 peaks).
inline double default_tau(double h, double delta, double r_in, double lambda1) {
  return 5.0 * (h + delta) / r_in * (0.5 * lambda1);
}

inline ConcavityReport verify_log_concavity(const RecoveredField& field, const GeodesicDomain& dom, double C,
                                            double tau_c = -1.0, double h = 0.0) {
  ConcavityReport r;
  r.C = C;
  r.delta = field.delta;
  r.h = h > 0.0 ? h : field.delta / 5.0;
  r.tau_c = tau_c >= 0.0 ? tau_c : default_tau(r.h, r.delta, dom.r0 - r.delta, field.lambda1);
  r.C_ge_minus_kappa_min = C >= -dom.kappa_inf;
  r.C_ge_minus_half_kappa = true;
  const RoundSphere* sphere = dom.surface ? std::get_if<RoundSphere>(&dom.surface->model()) : nullptr;
  r.sphere_mode = sphere != nullptr;
  for (const auto& q : field.points) {
    const DirectedEigen d = directed_eigen(q.hess_v + (C + 0.5 * q.kappa) * q.g, q.g);
    r.points.push_back(q.p);
    r.max_eig.push_back(d.max);
    if (C < -0.5 * q.kappa) r.C_ge_minus_half_kappa = false;
    if (d.max > r.global_max) r.global_max = d.max, r.argmax = q.p, r.direction = d.e1;
    if (r.sphere_mode) {
      const DirectedEigen hv = directed_eigen(q.hess_v, q.g);
      if (hv.max > r.hess_max) r.hess_max = hv.max, r.hess_argmax = q.p, r.hess_direction = hv.e1;
    }
  }
  r.verdict = r.global_max <= r.tau_c;
  if (r.sphere_mode) {
    const double R2 = sphere->radius * sphere->radius, n = 2.0;
    r.wang_bound = (n - std::sqrt(n * n + 4.0 * field.lambda1 * R2)) / R2;
    r.wang_corrected_bound = 0.5 * r.wang_bound;
    r.wang_verdict = r.hess_max <= r.wang_bound + r.tau_c;
    r.wang_corrected_verdict = r.hess_max <= r.wang_corrected_bound + r.tau_c;
  }
  return r;
}

// ---- barrier inequality -------------------------------------------------------

/// Barrier field b with gradient (coordinate partials) and Laplacian at a point.
struct BarrierValue {
  double b = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  double laplace = 0.0;
};

using BarrierFn = std::function<BarrierValue(const RecoveredPoint&)>;

inline BarrierFn constant_barrier(double b) {
  return [b](const RecoveredPoint&) { return BarrierValue{b, Eigen::Vector2d::Zero(), 0.0}; };
}

/// b = kappa/2 + C.
inline BarrierFn curvature_barrier(double C) {
  return [C](const RecoveredPoint& q) { return BarrierValue{0.5 * q.kappa + C, 0.5 * q.grad_kappa, 0.5 * q.delta_kappa}; };
}

struct BarrierPoint {
  Eigen::Vector2d p;
  Eigen::Vector2d e1;
  bool tie = false;
  double v1 = 0.0, v2 = 0.0, k1 = 0.0, k2 = 0.0;
  double b = 0.0, margin = 0.0;
};

struct BarrierReport {
  double lambda1 = 0.0;
  std::vector<BarrierPoint> points;
  double min_margin = INFINITY;
  Eigen::Vector2d argmin = Eigen::Vector2d::Zero();
  int ties = 0;
  bool verdict = false;  // margin > 0 everywhere
};

/// Delta b - [2 b^2 - 2<grad b, grad v> - 2 kappa (lambda1 + v1^2) + 4 b kappa + v2 kappa2 - v1 kappa1]
/// in the frame where e1 maximises Hess v.
inline double barrier_expression(double laplace_b, double b, double grad_b_dot_grad_v, double kappa, double lambda1,
                                 double v1, double v2, double k1, double k2) {
  return laplace_b - (2.0 * b * b - 2.0 * grad_b_dot_grad_v - 2.0 * kappa * (lambda1 + v1 * v1) + 4.0 * b * kappa +
                      v2 * k2 - v1 * k1);
}

inline BarrierReport barrier_margin(const RecoveredField& field, const BarrierFn& barrier, double lambda1) {
  BarrierReport r;
  r.lambda1 = lambda1;
  for (const auto& q : field.points) {
    const DirectedEigen d = directed_eigen(q.hess_v, q.g);
    const BarrierValue bv = barrier(q);
    BarrierPoint bp;
    bp.p = q.p;
    bp.e1 = d.e1;
    bp.tie = d.tie;
    bp.v1 = q.dv.dot(d.e1), bp.v2 = q.dv.dot(d.e2);
    bp.k1 = q.grad_kappa.dot(d.e1), bp.k2 = q.grad_kappa.dot(d.e2);
    bp.b = bv.b;
    bp.margin = barrier_expression(bv.laplace, bv.b, bv.grad.dot(q.ginv * q.dv), q.kappa, lambda1, bp.v1, bp.v2, bp.k1,
                                   bp.k2);
    r.ties += d.tie;
    if (bp.margin < r.min_margin) r.min_margin = bp.margin, r.argmin = q.p;
    r.points.push_back(bp);
  }
  r.verdict = r.min_margin > 0.0;
  return r;
}

/// Right-hand side of the expansion of the curvature-barrier margin:
/// (kappa/2) G + kappa2^2/(2 kappa) + 2 kappa (v1 + kappa1/(2 kappa))^2, G the general condition margin.
inline double barrier_identity_rhs(double dlk, double kappa, double lambda1, double C, double v1, double k1, double k2) {
  const double s = v1 + k1 / (2.0 * kappa);
  return 0.5 * kappa * general_margin(dlk, kappa, lambda1, C) + k2 * k2 / (2.0 * kappa) + 2.0 * kappa * s * s;
}

/// Largest relative deviation between barrier_margin with b = kappa/2 + C and its expansion.
inline double barrier_identity_residual(const RecoveredField& field, double C, double lambda1) {
  const BarrierReport rep = barrier_margin(field, curvature_barrier(C), lambda1);
  double worst = 0.0;
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& q = field.points[i];
    const auto& bp = rep.points[i];
    const double rhs = barrier_identity_rhs(q.delta_log_kappa, q.kappa, lambda1, C, bp.v1, bp.k1, bp.k2);
    const double scale = std::abs(bp.margin) + std::abs(rhs) + q.kappa * (lambda1 + std::abs(q.delta_log_kappa)) + 1.0;
    worst = std::max(worst, std::abs(bp.margin - rhs) / scale);
  }
  return worst;
}

// ---- fundamental gap ------------------------------------------------------------

struct GapReport {
  double lambda1 = 0.0, lambda2 = 0.0, gap = 0.0;
  double D = 0.0, D_lower = 0.0, D_upper = 0.0;
  double inf_kappa = 0.0, C = 0.0;
  double bound_curvature = 0.0;  // pi^2/D_upper^2 + inf kappa + C
  bool verdict_curvature = false;
  bool sphere_mode = false;
  double bound_sphere = NAN;            // pi^2/D_upper^2 + sqrt(n^2 + 4 lambda1) - (n+1)/2, n = 2
  bool verdict_sphere = false;
  double bound_sphere_corrected = NAN;  // pi^2/D_upper^2 + (sqrt(n^2 + 4 lambda1) - 1)/2
  bool verdict_sphere_corrected = false;
  bool C_ge_minus_kappa_min = false;
  bool C_ge_minus_half_kappa = false;   // C >= -sup kappa / 2
};

inline GapReport verify_gap(double lambda1, double lambda2, const GeodesicDomain& dom, double C) {
  GapReport r;
  r.lambda1 = lambda1, r.lambda2 = lambda2, r.gap = lambda2 - lambda1;
  if (!(r.gap > 0.0)) throw std::logic_error("verify_gap: lambda2 - lambda1 is not positive");
  r.D = dom.diameter.D, r.D_lower = dom.diameter.lower, r.D_upper = dom.diameter.upper;
  r.inf_kappa = dom.kappa_inf;
  r.C = C;
  const double pd = std::numbers::pi * std::numbers::pi / (r.D_upper * r.D_upper);
  r.bound_curvature = pd + r.inf_kappa + C;
  r.verdict_curvature = r.gap > r.bound_curvature;
  r.C_ge_minus_kappa_min = C >= -dom.kappa_inf;
  r.C_ge_minus_half_kappa = C >= -0.5 * dom.kappa_sup;
  const RoundSphere* sphere = dom.surface ? std::get_if<RoundSphere>(&dom.surface->model()) : nullptr;
  if (sphere) {
    r.sphere_mode = true;
    const double R2 = sphere->radius * sphere->radius, n = 2.0;
    const double root = std::sqrt(n * n + 4.0 * lambda1 * R2);
    r.bound_sphere = pd + (root - 0.5 * (n + 1.0)) / R2;
    r.verdict_sphere = r.gap > r.bound_sphere;
    r.bound_sphere_corrected = pd + 0.5 * (root - 1.0) / R2;
    r.verdict_sphere_corrected = r.gap > r.bound_sphere_corrected;
  }
  return r;
}

inline GapReport verify_gap(const SpectralSolution& sol, const GeodesicDomain& dom, double C) {
  return verify_gap(sol.lambda.at(0), sol.lambda.at(1), dom, C);
}

}  // namespace gapkit
