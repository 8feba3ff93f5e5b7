#pragma once
// Derivatives of v = log u1 on an interior grid. Nodal eigenfunctions are fitted
// by local least-squares quartics, so the recovered gradient and Hessian are
// smooth even though the finite element field is piecewise linear.

#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "gapkit/fem.hpp"
#include "gapkit/geometry.hpp"

namespace gapkit {

/// Value, gradient and Hessian of a local polynomial fit, in chart coordinates.
struct LocalJet {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

/// Least-squares quartic through the samples (x_i, y_i) around the centre c.
inline LocalJet fit_local_poly(const Eigen::Vector2d& c, const std::vector<Eigen::Vector2d>& x,
                                const std::vector<double>& y, double radius) {
  const int n = static_cast<int>(x.size());
  if (n < 20) throw std::runtime_error("fit_local_poly: too few samples");
  Eigen::MatrixXd A(n, 15);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double s = (x[i].x() - c.x()) / radius, t = (x[i].y() - c.y()) / radius;
    A.row(i) << 1, s, t, s * s, s * t, t * t, s * s * s, s * s * t, s * t * t, t * t * t, s * s * s * s,
        s * s * s * t, s * s * t * t, s * t * t * t, t * t * t * t;
    b(i) = y[i];
  }
  const Eigen::VectorXd a = A.colPivHouseholderQr().solve(b);
  LocalJet j;
  j.value = a(0);
  j.grad << a(1) / radius, a(2) / radius;
  j.hess << 2 * a(3), a(4), a(4), 2 * a(5);
  j.hess /= radius * radius;
  return j;
}

/// Uniform bucket grid over mesh vertices for radius queries.
class VertexIndex {
 public:
  VertexIndex(const TriMesh& mesh, double cell) : mesh_(mesh), cell_(cell) {
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) buckets_[key(mesh.param[i])].push_back(static_cast<int>(i));
  }
  std::vector<int> within(const Eigen::Vector2d& p, double radius) const {
    std::vector<int> out;
    const int span = static_cast<int>(std::ceil(radius / cell_));
    const auto [cx, cy] = cellof(p);
    for (int dx = -span; dx <= span; ++dx)
      for (int dy = -span; dy <= span; ++dy) {
        const auto it = buckets_.find(pack(cx + dx, cy + dy));
        if (it == buckets_.end()) continue;
        for (int v : it->second)
          if ((mesh_.param[v] - p).norm() <= radius) out.push_back(v);
      }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::pair<long, long> cellof(const Eigen::Vector2d& p) const {
    return {static_cast<long>(std::floor(p.x() / cell_)), static_cast<long>(std::floor(p.y() / cell_))};
  }
  static long long pack(long x, long y) { return (static_cast<long long>(x) << 32) ^ static_cast<long long>(y & 0xffffffff); }
  long long key(const Eigen::Vector2d& p) const {
    const auto [x, y] = cellof(p);
    return pack(x, y);
  }
  const TriMesh& mesh_;
  double cell_;
  std::unordered_map<long long, std::vector<int>> buckets_;
};

struct RecoveredPoint {
  Eigen::Vector2d p;
  Eigen::Matrix2d g, ginv;
  Christoffel gamma;
  double kappa = 0.0;
  Eigen::Vector2d grad_kappa = Eigen::Vector2d::Zero();  // coordinate partials
  double delta_kappa = 0.0, delta_log_kappa = 0.0;
  double u1 = 0.0, v = 0.0;
  Eigen::Vector2d dv = Eigen::Vector2d::Zero();          // coordinate partials of v
  Eigen::Matrix2d hess_v = Eigen::Matrix2d::Zero();      // covariant Hessian of v
  double laplace_v = 0.0;
  double identity_residual = 0.0;  // |grad v|^2 + lambda1 + Delta v
  double w_residual = 0.0;         // Delta w + 2<grad v, grad w> + (lambda2 - lambda1) w, w = u2/u1
  double w = 0.0;
};

struct RecoveredField {
  double delta = 0.0, grid_step = 0.0, fit_radius = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  std::vector<RecoveredPoint> points;
  double identity_sup = 0.0;
  double w_residual_sup = 0.0, w_sup = 0.0;
};

/// Recovers v = log u1 and its covariant derivatives on the grid of spacing
/// grid_step restricted to points at distance >= delta from the cap boundary.
/// delta <= 0 selects 5h; grid_step <= 0 selects 2h.
inline RecoveredField recover_derivatives(const SpectralSolution& sol, const GeodesicDomain& dom, double delta = 0.0,
                                          double grid_step = 0.0) {
  const TriMesh& mesh = *sol.mesh;
  const double h = sol.h;
  RecoveredField out;
  out.delta = delta > 0.0 ? delta : 5.0 * h;
  out.grid_step = grid_step > 0.0 ? grid_step : 2.0 * h;
  out.fit_radius = 5.5 * h;
  out.lambda1 = sol.lambda.at(0);
  out.lambda2 = sol.lambda.size() > 1 ? sol.lambda[1] : NAN;
  const double rin = dom.r0 - out.delta;
  if (!(rin > 0.0)) throw std::invalid_argument("recover_derivatives: evaluation grid is empty (delta too large)");
  const VertexIndex index(mesh, out.fit_radius);
  const int n = static_cast<int>(std::floor(rin / out.grid_step));
  const RadialProfile& rp = dom.profile;
  for (int j = -n; j <= n; ++j)
    for (int i = -n; i <= n; ++i) {
      const Eigen::Vector2d p(i * out.grid_step, j * out.grid_step);
      const double r = p.norm();
      if (r > rin) continue;
      const auto nb = index.within(p, out.fit_radius);
      std::vector<Eigen::Vector2d> xs;
      std::vector<double> y1, y2;
      for (int v : nb) {
        xs.push_back(mesh.param[v]);
        y1.push_back(sol.modes[0](v));
        if (sol.modes.size() > 1) y2.push_back(sol.modes[1](v));
      }
      const LocalJet u = fit_local_poly(p, xs, y1, out.fit_radius);
      if (!(u.value > 0.0)) throw std::runtime_error("recover_derivatives: u1 not positive on the evaluation grid");
      RecoveredPoint q;
      q.p = p;
      const MetricJet mj = cap_metric(rp, p);
      q.g = mj.matrix();
      q.ginv = q.g.inverse();
      q.gamma = christoffel(mj);
      q.kappa = rp.kappa(r);
      q.grad_kappa = r > 0.0 ? Eigen::Vector2d(rp.dkappa(r) * p / r) : Eigen::Vector2d::Zero();
      q.delta_kappa = rp.delta_kappa(r);
      q.delta_log_kappa = rp.delta_log_kappa(r);
      q.u1 = u.value;
      q.v = std::log(u.value);
      q.dv = u.grad / u.value;
      Eigen::Matrix2d d2v = u.hess / u.value - q.dv * q.dv.transpose();
      auto covariant = [&](const Eigen::Matrix2d& d2, const Eigen::Vector2d& d1) {
        Eigen::Matrix2d H;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) H(a, b) = d2(a, b) - q.gamma.gamma[0][a][b] * d1(0) - q.gamma.gamma[1][a][b] * d1(1);
        return Eigen::Matrix2d(0.5 * (H + H.transpose()));
      };
      q.hess_v = covariant(d2v, q.dv);
      q.laplace_v = (q.ginv.cwiseProduct(q.hess_v)).sum();
      q.identity_residual = q.dv.dot(q.ginv * q.dv) + out.lambda1 + q.laplace_v;
      if (!y2.empty()) {
        const LocalJet u2 = fit_local_poly(p, xs, y2, out.fit_radius);
        const double a = u.value;
        q.w = u2.value / a;
        const Eigen::Vector2d dw = (u2.grad - q.w * u.grad) / a;
        const Eigen::Matrix2d d2w = u2.hess / a - (u2.grad * u.grad.transpose() + u.grad * u2.grad.transpose()) / (a * a) -
                                    u2.value * u.hess / (a * a) +
                                    2.0 * u2.value * u.grad * u.grad.transpose() / (a * a * a);
        const double lw = (q.ginv.cwiseProduct(covariant(d2w, dw))).sum();
        q.w_residual = lw + 2.0 * q.dv.dot(q.ginv * dw) + (out.lambda2 - out.lambda1) * q.w;
        out.w_residual_sup = std::max(out.w_residual_sup, std::abs(q.w_residual));
        out.w_sup = std::max(out.w_sup, std::abs(q.w));
      }
      out.identity_sup = std::max(out.identity_sup, std::abs(q.identity_residual));
      out.points.push_back(q);
    }
  if (out.points.empty()) throw std::invalid_argument("recover_derivatives: evaluation grid is empty (delta too large)");
  return out;
}

}  // namespace gapkit
