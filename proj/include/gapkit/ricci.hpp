#pragma once
// Normalized Ricci flow on rotationally symmetric spheres in the conformal gauge
// g = e^{2 phi} g_round, phi = phi(theta), and the closed-form comparison bounds
// for pinched initial curvature.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gapkit {

// ---- closed-form bounds -----------------------------------------------------

struct BoundCurve {
  double alpha = 1.0, C0 = 0.0, C1 = 0.0, t_max = INFINITY;
  explicit BoundCurve(double a) : alpha(a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("BoundCurve: alpha must lie in (0, 1)");
    C0 = 1.0 - a;
    C1 = 1.0 / a - 1.0;
    t_max = std::log(1.0 / (1.0 - a));
  }
};

struct OdeBounds {
  double kappa_max = 0.0;  // 1/(1 - C0 e^t)
  double kappa_min = 0.0;  // 1/(1 + C1 e^t)
  double pinching = 0.0;   // C1 e^t/(1 - C0 e^t)
  double harnack = 0.0;    // -e^t/(e^t - 1)
  double margin = 0.0;     // harnack + 1 - 6 pinching + 5 kappa_min
};

inline double harnack_floor(double t) { return -std::exp(t) / std::expm1(t); }

inline OdeBounds ode_bounds(double alpha, double t) {
  const BoundCurve bc(alpha);
  if (!(t > 0.0)) throw std::invalid_argument("ode_bounds: t must be positive");
  if (!(t < bc.t_max)) throw std::domain_error("ode_bounds: t >= log(1/(1-alpha)), bounds are invalid");
  const double et = std::exp(t);
  OdeBounds b;
  b.kappa_max = 1.0 / (1.0 - bc.C0 * et);
  b.kappa_min = 1.0 / (1.0 + bc.C1 * et);
  b.pinching = bc.C1 * et / (1.0 - bc.C0 * et);
  b.harnack = harnack_floor(t);
  b.margin = 1.0 + b.harnack - 6.0 * b.pinching + 5.0 * b.kappa_min;
  return b;
}

struct OnsetTimes {
  double t_on = NAN, t_off = NAN;
  std::vector<std::pair<double, double>> sweep;
};

/// First negative-to-positive and last positive-to-negative crossing of the
/// closed-form margin on (0, t_max), bisected to tol.
inline OnsetTimes onset_times(double alpha, int samples = 4000, double tol = 1e-12) {
  const BoundCurve bc(alpha);
  auto m = [alpha](double t) { return ode_bounds(alpha, t).margin; };
  OnsetTimes o;
  for (int i = 1; i < samples; ++i) {
    const double t = bc.t_max * i / samples;
    o.sweep.emplace_back(t, m(t));
  }
  auto bisect = [&](double a, double b) {
    const bool pa = m(a) > 0.0;
    while (b - a > tol) {
      const double c = 0.5 * (a + b);
      if ((m(c) > 0.0) == pa) a = c;
      else b = c;
    }
    return 0.5 * (a + b);
  };
  int first = -1, last = -1;
  for (std::size_t i = 0; i + 1 < o.sweep.size(); ++i) {
    const bool a = o.sweep[i].second > 0.0, b = o.sweep[i + 1].second > 0.0;
    if (!a && b && first < 0) first = static_cast<int>(i);
    if (a && !b) last = static_cast<int>(i);
  }
  if (first < 0) throw std::runtime_error("onset_times: margin is never positive on (0, t_max)");
  o.t_on = bisect(o.sweep[first].first, o.sweep[first + 1].first);
  if (last >= 0) o.t_off = bisect(o.sweep[last].first, o.sweep[last + 1].first);
  return o;
}

// ---- conformal flow -----------------------------------------------------------

struct FlowState {
  double t = 0.0;
  Eigen::VectorXd phi;      // at the collocation angles
  Eigen::VectorXd kappa;
  Eigen::VectorXd harnack;  // Delta log kappa + kappa - 1
  double kappa_min = 0.0, kappa_max = 0.0;
  double area = 0.0;
  double harnack_min = 0.0;
  double evolution_residual = 0.0;        // |d_t kappa - (Delta kappa/2 + kappa^2 - kappa)| over the last step
  double evolution_residual_full = 0.0;  // same with the full Laplacian coefficient
  int substeps = 0;
};

/// Cosine collocation at theta_j = pi (j + 1/2)/N. The cosine space of degree < N
/// is invariant under the round Laplacian, so the differentiation matrix is exact
/// on it; even reflection at both poles is built in.
class ConformalFlow {
 public:
  explicit ConformalFlow(int n) : n_(n) {
    if (n < 8) throw std::invalid_argument("ConformalFlow: grid too small");
    theta_.resize(n);
    for (int j = 0; j < n; ++j) theta_(j) = std::numbers::pi * (j + 0.5) / n;
    Eigen::MatrixXd T(n, n), B(n, n), Tinv(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double th = theta_(j);
        T(j, k) = std::cos(k * th);
        B(j, k) = -double(k) * k * std::cos(k * th) - k * std::sin(k * th) * std::cos(th) / std::sin(th);
      }
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) Tinv(k, j) = T(j, k) * (k == 0 ? 1.0 : 2.0) / n;
    to_coef_ = Tinv;
    lap_ = B * Tinv;
    // Fejer's first rule for int_0^pi g sin(theta) d theta
    w_.resize(n);
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 1; k <= n / 2; ++k) s += std::cos(2.0 * k * theta_(j)) / (4.0 * k * k - 1.0);
      w_(j) = 2.0 / n * (1.0 - 2.0 * s);
    }
    pole0_.resize(n), pole1_.resize(n);
    for (int k = 0; k < n; ++k) pole0_(k) = 1.0, pole1_(k) = (k % 2 ? -1.0 : 1.0);
  }

  int size() const { return n_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  double spacing() const { return std::numbers::pi / n_; }

  Eigen::VectorXd round_laplacian(const Eigen::VectorXd& f) const { return lap_ * f; }
  /// Values of a collocated field at theta = 0 and theta = pi.
  std::pair<double, double> pole_values(const Eigen::VectorXd& f) const {
    const Eigen::VectorXd c = to_coef_ * f;
    return {pole0_.dot(c), pole1_.dot(c)};
  }
  double area(const Eigen::VectorXd& phi) const {
    return 2.0 * std::numbers::pi * w_.dot((2.0 * phi).array().exp().matrix());
  }
  Eigen::VectorXd curvature(const Eigen::VectorXd& phi) const {
    return ((-2.0 * phi).array().exp() * (1.0 - (lap_ * phi).array())).matrix();
  }
  Eigen::VectorXd laplacian(const Eigen::VectorXd& phi, const Eigen::VectorXd& f) const {
    return ((-2.0 * phi).array().exp() * (lap_ * f).array()).matrix();
  }

  FlowState state(const Eigen::VectorXd& phi, double t) const {
    FlowState s;
    s.t = t;
    s.phi = phi;
    s.kappa = curvature(phi);
    if (!(s.kappa.minCoeff() > 0.0)) throw std::runtime_error("ConformalFlow: curvature is no longer positive");
    const auto [k0, kpi] = pole_values(s.kappa);
    s.kappa_min = std::min({s.kappa.minCoeff(), k0, kpi});
    s.kappa_max = std::max({s.kappa.maxCoeff(), k0, kpi});
    s.area = area(phi);
    const Eigen::VectorXd lk = s.kappa.array().log().matrix();
    s.harnack = laplacian(phi, lk) + s.kappa - Eigen::VectorXd::Ones(n_);
    s.harnack_min = s.harnack.minCoeff();
    return s;
  }

  double cfl_limit(const FlowState& s) const { return 0.25 * spacing() * spacing() / s.kappa_max; }

  /// Advances by dt with RK4 on phi_t = (1 - kappa)/2, substepping to respect the
  /// CFL limit (strict: throw instead).
  FlowState step(const FlowState& s, double dt, bool strict = false) const {
    if (!(dt > 0.0)) throw std::invalid_argument("flow_step: dt must be positive");
    const double lim = cfl_limit(s);
    if (strict && dt > lim) throw std::domain_error("flow_step: dt violates the CFL limit");
    const int m = static_cast<int>(std::ceil(dt / lim - 1e-12));
    const double h = dt / m;
    auto rhs = [&](const Eigen::VectorXd& phi) -> Eigen::VectorXd { return 0.5 * (1.0 - curvature(phi).array()); };
    Eigen::VectorXd phi = s.phi;
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd k1 = rhs(phi);
      const Eigen::VectorXd k2 = rhs(phi + 0.5 * h * k1);
      const Eigen::VectorXd k3 = rhs(phi + 0.5 * h * k2);
      const Eigen::VectorXd k4 = rhs(phi + h * k3);
      phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    FlowState out = state(phi, s.t + dt);
    out.substeps = m;
    // curvature evolution check, trapezoidal in time
    auto evo = [&](const FlowState& st, double c) -> Eigen::VectorXd {
      return (c * laplacian(st.phi, st.kappa).array() + st.kappa.array().square() - st.kappa.array()).matrix();
    };
    const Eigen::VectorXd dk = (out.kappa - s.kappa) / dt;
    out.evolution_residual = (dk - 0.5 * (evo(s, 0.5) + evo(out, 0.5))).cwiseAbs().maxCoeff();
    out.evolution_residual_full = (dk - 0.5 * (evo(s, 1.0) + evo(out, 1.0))).cwiseAbs().maxCoeff();
    return out;
  }

 private:
  int n_;
  Eigen::VectorXd theta_, w_, pole0_, pole1_;
  Eigen::MatrixXd lap_, to_coef_;
};

inline FlowState flow_step(const ConformalFlow& flow, const FlowState& s, double dt, bool strict = false) {
  return flow.step(s, dt, strict);
}

/// phi = A P2(cos theta) + c with A > 0 chosen so that kappa_min/kappa_max = alpha
/// and c so that the area is 4 pi (average curvature 1).
inline FlowState pinched_initial_state(const ConformalFlow& flow, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("pinched_initial_state: alpha must lie in (0, 1]");
  const Eigen::VectorXd z = flow.theta().array().cos().matrix();
  const Eigen::VectorXd p2 = (0.5 * (3.0 * z.array().square() - 1.0)).matrix();
  if (alpha == 1.0) return flow.state(Eigen::VectorXd::Zero(flow.size()), 0.0);
  auto ratio = [&](double A) {
    const FlowState s = flow.state(A * p2, 0.0);
    return s.kappa_min / s.kappa_max;
  };
  double lo = 0.0, hi = 1e-3;
  while (ratio(hi) > alpha) {
    lo = hi, hi *= 2.0;
    if (hi > 1.0) throw std::runtime_error("pinched_initial_state: pinching ratio not reachable in the P2 family");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) > alpha) lo = mid;
    else hi = mid;
  }
  const Eigen::VectorXd phi = 0.5 * (lo + hi) * p2;
  const double c = -0.5 * std::log(flow.area(phi) / (4.0 * std::numbers::pi));
  return flow.state((phi.array() + c).matrix(), 0.0);
}

inline FlowState round_initial_state(const ConformalFlow& flow) {
  return flow.state(Eigen::VectorXd::Zero(flow.size()), 0.0);
}

// ---- dominance trace ------------------------------------------------------------

struct TraceRow {
  double t = 0.0, kappa_min = 0.0, kappa_max = 0.0, area = 0.0;
  double harnack_floor_gap = NAN;    // min harnack quantity minus the floor (t > 0)
  double margin_closed_form = NAN;   // from ode_bounds, NaN outside (0, t_max)
  double margin_measured = NAN;      // 1 + floor - 6 kappa_max + 11 kappa_min along the flow
  double margin_pointwise = NAN;     // min over the grid of Delta log kappa - 5 kappa + 11 kappa_min
  double kappa_max_bound = NAN, kappa_min_bound = NAN;
  double evolution_residual = 0.0;
};

struct DominanceTrace {
  double alpha = 1.0;
  std::vector<TraceRow> rows;
  std::optional<double> first_positive_closed, first_positive_measured, first_positive_pointwise;
  bool truncated_closed_form = false;  // horizon went past t_max
};

inline DominanceTrace dominance_trace(const ConformalFlow& flow, const FlowState& initial, double alpha, double horizon,
                                      double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("dominance_trace: bad horizon or dt");
  DominanceTrace tr;
  tr.alpha = alpha;
  const bool bounds = alpha > 0.0 && alpha < 1.0;
  const double tmax = bounds ? BoundCurve(alpha).t_max : INFINITY;
  FlowState s = initial;
  const int steps = static_cast<int>(std::llround(horizon / dt));
  for (int i = 0; i <= steps; ++i) {
    if (i > 0) s = flow.step(s, dt);
    s.t = i * dt;
    TraceRow row;
    row.t = s.t, row.kappa_min = s.kappa_min, row.kappa_max = s.kappa_max, row.area = s.area;
    row.evolution_residual = s.evolution_residual;
    if (s.t > 0.0) {
      const double floor = harnack_floor(s.t);
      row.harnack_floor_gap = s.harnack_min - floor;
      row.margin_measured = 1.0 + floor - 6.0 * s.kappa_max + 11.0 * s.kappa_min;
      const Eigen::VectorXd dlk = flow.laplacian(s.phi, s.kappa.array().log().matrix());
      row.margin_pointwise = (dlk.array() - 5.0 * s.kappa.array() + 11.0 * s.kappa_min).minCoeff();
      if (bounds && s.t < tmax) {
        const OdeBounds b = ode_bounds(alpha, s.t);
        row.margin_closed_form = b.margin;
        row.kappa_max_bound = b.kappa_max;
        row.kappa_min_bound = b.kappa_min;
      } else if (bounds) {
        tr.truncated_closed_form = true;
      }
      if (!tr.first_positive_closed && row.margin_closed_form > 0.0) tr.first_positive_closed = s.t;
      if (!tr.first_positive_measured && row.margin_measured > 0.0) tr.first_positive_measured = s.t;
      if (!tr.first_positive_pointwise && row.margin_pointwise > 0.0) tr.first_positive_pointwise = s.t;
    }
    tr.rows.push_back(row);
  }
  return tr;
}

}  // namespace gapkit
