#pragma once
// Analytic surface models, curvature, and intrinsic differential operators.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gapkit/geometry.hpp"
#include "gapkit/jet.hpp"
#include "gapkit/profile.hpp"
#include "gapkit/quadrature.hpp"

namespace gapkit {

struct RoundSphere {
  double radius = 1.0;
};

struct SurfaceOfRevolution {
  ProfileCurve profile;
};

/// x^2/a + y^2/b + z^2/c = 1 with squared semi-axes a <= b <= c.
struct TriaxialEllipsoid {
  double a = 1.0, b = 1.0, c = 1.0;

  EllipsoidAtlas atlas() const { return {std::sqrt(a), std::sqrt(b), std::sqrt(c)}; }

  double kappa_at(const Eigen::Vector3d& x) const {
    const double h2 = x.x() * x.x() / (a * a) + x.y() * x.y() / (b * b) + x.z() * x.z() / (c * c);
    return 1.0 / (a * b * c * h2 * h2);
  }
};

struct ParametricChart {
  std::function<MetricJet(ChartPoint)> metric;
  double u_lo = 0.0, u_hi = 1.0;
  double v_lo = 0.0, v_hi = 1.0;
  bool periodic_v = false;
};

/// A surface described by one chart, or by two overlapping charts with a
/// transition map. Curvature comes from the first fundamental form.
struct ParametricSurface {
  std::vector<ParametricChart> charts;
  std::function<ChartPoint(int from, ChartPoint)> transfer;
  std::function<int(ChartPoint)> preferred_chart;  // argument in chart 0
  bool closed = false;
  std::string family = "custom";
  std::vector<double> coefficients;

  /// exp(2 phi) times the unit round metric, phi(z) = sum_k c_k T_k(z) with
  /// z the height coordinate and T_k Chebyshev polynomials.
  static ParametricSurface conformal_sphere(std::vector<double> chebyshev);

  /// The (x, theta) chart of a surface of revolution, curvature by Brioschi.
  static ParametricSurface revolution_chart(const ProfileCurve& profile);
};

using SurfaceModel = std::variant<RoundSphere, SurfaceOfRevolution, TriaxialEllipsoid, ParametricSurface>;

inline std::string model_kind(const SurfaceModel& m) {
  switch (m.index()) {
    case 0: return "sphere";
    case 1: return "revolution";
    case 2: return "triaxial";
    default: return "parametric";
  }
}

namespace detail {

/// phi, phi', phi'' of a Chebyshev series.
inline std::array<double, 3> chebyshev_series(const std::vector<double>& c, double z) {
  if (c.empty()) return {0.0, 0.0, 0.0};
  double v = c[0], d = 0.0, s = 0.0;
  double t0 = 1.0, t1 = z, d0 = 0.0, d1 = 1.0, s0 = 0.0, s1 = 0.0;
  if (c.size() > 1) v += c[1] * z, d += c[1];
  for (std::size_t k = 2; k < c.size(); ++k) {
    const double t2 = 2.0 * z * t1 - t0;
    const double d2 = 2.0 * t1 + 2.0 * z * d1 - d0;
    const double s2 = 4.0 * d1 + 2.0 * z * s1 - s0;
    v += c[k] * t2, d += c[k] * d2, s += c[k] * s2;
    t0 = t1, t1 = t2, d0 = d1, d1 = d2, s0 = s1, s1 = s2;
  }
  return {v, d, s};
}

inline MetricJet revolution_metric(const ProfileCurve& profile, double x) {
  const Jet<4> q = profile.squared(x);
  const Jet<4> F = sqrt(q);
  const Jet<3> Fp = F.derivative();
  const Jet<3> E = 1.0 + Fp * Fp;
  MetricJet m;
  m.E = E[0], m.Eu = E[1], m.Euu = E[2];
  m.F = 0.0;
  m.G = q[0], m.Gu = q[1], m.Guu = q[2];
  return m;
}

/// Uniform access to the chart structure of any model.
struct AtlasView {
  int charts = 1;
  double u_lo = 0.0, u_hi = 1.0, v_lo = 0.0, v_hi = 1.0;
  bool periodic_v = true;
  bool one_dimensional = false;  // rotationally symmetric in v
  bool degenerate_u_ends = false;
  std::function<MetricJet(int, ChartPoint)> metric;
  std::function<double(int, ChartPoint)> kappa;
  std::function<ChartPoint(int, ChartPoint)> transfer;  // chart c -> chart 1 - c
  std::function<int(ChartPoint)> preferred;             // chart-0 point

  std::pair<int, ChartPoint> place(ChartPoint p0) const {
    if (charts == 1) return {0, p0};
    const int c = preferred(p0);
    return {c, c == 0 ? p0 : transfer(0, p0)};
  }
  ChartPoint to_primary(int chart, ChartPoint p) const { return chart == 0 ? p : transfer(1, p); }
  double extent() const { return u_hi - u_lo; }
};

inline AtlasView ellipsoid_view(const EllipsoidAtlas& atlas) {
  AtlasView a;
  a.charts = 2;
  a.u_lo = 0.0, a.u_hi = std::numbers::pi;
  a.v_lo = -std::numbers::pi, a.v_hi = std::numbers::pi;
  a.periodic_v = true;
  a.degenerate_u_ends = true;
  a.metric = [atlas](int c, ChartPoint p) { return metric_from_embedding(atlas.embedding(c, p)); };
  a.transfer = [atlas](int from, ChartPoint p) { return atlas.transfer(from, p); };
  a.preferred = [atlas](ChartPoint p) { return atlas.preferred_chart(p); };
  return a;
}

inline AtlasView atlas_view(const SurfaceModel& model) {
  return std::visit(
      [](const auto& m) -> AtlasView {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RoundSphere>) {
          AtlasView a = ellipsoid_view({m.radius, m.radius, m.radius});
          const double k = 1.0 / (m.radius * m.radius);
          a.kappa = [k](int, ChartPoint) { return k; };
          return a;
        } else if constexpr (std::is_same_v<T, TriaxialEllipsoid>) {
          const EllipsoidAtlas atlas = m.atlas();
          AtlasView a = ellipsoid_view(atlas);
          a.kappa = [m, atlas](int c, ChartPoint p) { return m.kappa_at(atlas.position(c, p)); };
          return a;
        } else if constexpr (std::is_same_v<T, SurfaceOfRevolution>) {
          AtlasView a;
          const ProfileCurve profile = m.profile;
          a.u_lo = profile.x_lo(), a.u_hi = profile.x_hi();
          a.v_lo = -std::numbers::pi, a.v_hi = std::numbers::pi;
          a.one_dimensional = true;
          a.degenerate_u_ends = profile.closed();
          a.metric = [profile](int, ChartPoint p) { return revolution_metric(profile, p.u); };
          a.kappa = [profile](int, ChartPoint p) { return revolution_kappa_at(profile, p.u); };
          return a;
        } else {
          if (m.charts.empty()) throw std::invalid_argument("ParametricSurface: no chart");
          AtlasView a;
          a.charts = static_cast<int>(std::min<std::size_t>(m.charts.size(), 2));
          const ParametricChart& c0 = m.charts.front();
          a.u_lo = c0.u_lo, a.u_hi = c0.u_hi, a.v_lo = c0.v_lo, a.v_hi = c0.v_hi;
          a.periodic_v = c0.periodic_v;
          a.degenerate_u_ends = m.closed;
          const auto charts = m.charts;
          a.metric = [charts](int c, ChartPoint p) { return charts[c].metric(p); };
          a.kappa = [charts](int c, ChartPoint p) { return brioschi_curvature(charts[c].metric(p)); };
          if (a.charts == 2) {
            if (!m.transfer || !m.preferred_chart)
              throw std::invalid_argument("ParametricSurface: two charts need transfer and preferred_chart");
            a.transfer = m.transfer;
            a.preferred = m.preferred_chart;
          }
          return a;
        }
      },
      model);
}

inline void check_point(const AtlasView& a, ChartPoint p) {
  if (!(p.u >= a.u_lo && p.u <= a.u_hi) || !std::isfinite(p.v))
    throw std::out_of_range("point outside the chart domain");
  if (!a.periodic_v && !(p.v >= a.v_lo && p.v <= a.v_hi))
    throw std::out_of_range("point outside the chart domain");
}

/// Divergence-form Laplace-Beltrami by centered differences on a 9-point stencil.
inline double fd_laplacian(const AtlasView& a, int chart, ChartPoint p,
                           const std::function<double(ChartPoint)>& f, double h) {
  if (!(p.u - h > a.u_lo && p.u + h < a.u_hi) ||
      (!a.periodic_v && !(p.v - h > a.v_lo && p.v + h < a.v_hi)))
    throw std::domain_error("finite-difference stencil leaves the chart");
  auto at = [&](int i, int j) { return f({p.u + i * h, p.v + j * h}); };
  const double fmm = at(-1, -1), fm0 = at(-1, 0), fmp = at(-1, 1);
  const double f0m = at(0, -1), f00 = at(0, 0), f0p = at(0, 1);
  const double fpm = at(1, -1), fp0 = at(1, 0), fpp = at(1, 1);
  auto flux = [&](double du, double dv) {
    // W g^{uu}, W g^{uv}, W g^{vv} at a half point
    const MetricJet m = a.metric(chart, {p.u + du, p.v + dv});
    const double det = m.det();
    const double W = std::sqrt(det);
    return std::array<double, 3>{W * m.G / det, -W * m.F / det, W * m.E / det};
  };
  const auto up = flux(0.5 * h, 0.0), um = flux(-0.5 * h, 0.0);
  const auto vp = flux(0.0, 0.5 * h), vm = flux(0.0, -0.5 * h);
  const double ju_p = up[0] * (fp0 - f00) / h + up[1] * ((fpp - fpm) + (f0p - f0m)) / (4.0 * h);
  const double ju_m = um[0] * (f00 - fm0) / h + um[1] * ((f0p - f0m) + (fmp - fmm)) / (4.0 * h);
  const double jv_p = vp[2] * (f0p - f00) / h + vp[1] * ((fpp - fmp) + (fp0 - fm0)) / (4.0 * h);
  const double jv_m = vm[2] * (f00 - f0m) / h + vm[1] * ((fp0 - fm0) + (fpm - fmm)) / (4.0 * h);
  const MetricJet m0 = a.metric(chart, p);
  const double det0 = m0.det();
  if (!(det0 > 0.0)) throw std::domain_error("metric is not positive definite at the stencil centre");
  return ((ju_p - ju_m) + (jv_p - jv_m)) / (h * std::sqrt(det0));
}

}  // namespace detail

struct FdOptions {
  double step = 0.0;  // 0 selects max(1e-4, cell/4) for a 512-cell chart
  bool richardson = false;
};

/// Scalar field on the primary chart, optionally with exact partials
/// (f, f_u, f_v, f_uu, f_uv, f_vv).
struct ScalarField {
  std::function<double(ChartPoint)> value;
  std::function<std::array<double, 6>(ChartPoint)> jet;
};

namespace detail {

inline double fd_step(const AtlasView& a, const FdOptions& o) {
  if (o.step > 0.0) return o.step;
  return std::max(1e-4, a.extent() / 512.0 / 4.0);
}

inline double fd_with_options(const AtlasView& a, int chart, ChartPoint p,
                              const std::function<double(ChartPoint)>& f, const FdOptions& o) {
  const double h = fd_step(a, o);
  const double coarse = fd_laplacian(a, chart, p, f, h);
  if (!o.richardson) return coarse;
  const double fine = fd_laplacian(a, chart, p, f, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

inline double log_kappa_checked(const AtlasView& a, int chart, ChartPoint q) {
  const double k = a.kappa(chart, q);
  if (!(k > 0.0)) throw std::domain_error("curvature is not positive");
  return std::log(k);
}

}  // namespace detail

inline double gaussian_curvature(const SurfaceModel& model, ChartPoint p) {
  if (const auto* rev = std::get_if<SurfaceOfRevolution>(&model)) {
    const ProfileCurve& pr = rev->profile;
    if (!pr.contains(p.u)) throw std::out_of_range("point outside the chart domain");
    if (p.u > pr.x_lo() && p.u < pr.x_hi()) {
      if (!(pr.squared(p.u)[0] > 0.0)) throw std::domain_error("degenerate profile: f = 0 at an interior point");
      if (pr.ds_dx(p.u) <= 1e3) return revolution_kappa(pr.arclength_jet(p.u));
    }
    return revolution_kappa_at(pr, p.u);
  }
  const detail::AtlasView a = detail::atlas_view(model);
  detail::check_point(a, p);
  const auto [c, q] = a.place(p);
  return a.kappa(c, q);
}

inline double delta_log_kappa(const SurfaceModel& model, ChartPoint p, const FdOptions& opts = {}) {
  if (std::holds_alternative<RoundSphere>(model)) {
    if (!(p.u >= 0.0 && p.u <= std::numbers::pi)) throw std::out_of_range("point outside the chart domain");
    return 0.0;
  }
  if (const auto* rev = std::get_if<SurfaceOfRevolution>(&model)) {
    const ProfileCurve& pr = rev->profile;
    if (!pr.contains(p.u)) throw std::out_of_range("point outside the chart domain");
    if (p.u > pr.x_lo() && p.u < pr.x_hi() && pr.ds_dx(p.u) <= 1e3) {
      const Jet<4> f = pr.arclength_jet(p.u);
      if (!(revolution_kappa(f) > 0.0)) throw std::domain_error("curvature is not positive");
      return revolution_delta_log_kappa(f);
    }
    return revolution_point_data(pr, p.u).delta_log_kappa;
  }
  const detail::AtlasView a = detail::atlas_view(model);
  detail::check_point(a, p);
  const auto [c, q] = a.place(p);
  const int chart = c;
  detail::log_kappa_checked(a, chart, q);
  return detail::fd_with_options(a, chart, q, [&](ChartPoint s) { return detail::log_kappa_checked(a, chart, s); },
                                 opts);
}

inline double laplace_beltrami(const SurfaceModel& model, const ScalarField& field, ChartPoint p,
                               const FdOptions& opts = {}) {
  const detail::AtlasView a = detail::atlas_view(model);
  detail::check_point(a, p);
  const auto [chart, q] = a.place(p);
  if (field.jet && chart == 0) {
    const MetricJet m = a.metric(0, p);
    const double det = m.det();
    if (det > 1e-14 * std::max(1.0, m.E * m.G)) {
      const Christoffel g = christoffel(m);
      const auto j = field.jet(p);
      const double d1[2] = {j[1], j[2]};
      const double d2[2][2] = {{j[3], j[4]}, {j[4], j[5]}};
      const double inv[2][2] = {{m.G / det, -m.F / det}, {-m.F / det, m.E / det}};
      double lap = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
          lap += inv[i][k] * (d2[i][k] - g(0, i, k) * d1[0] - g(1, i, k) * d1[1]);
      return lap;
    }
  }
  const auto value = field.value;
  const int c = chart;
  return detail::fd_with_options(
      a, c, q, [&](ChartPoint s) { return value(a.to_primary(c, s)); }, opts);
}

struct CurvatureExtrema {
  double kappa_min = 0.0, kappa_max = 0.0;
  ChartPoint argmin, argmax;
};

/// Sampling grid in primary chart coordinates. Closed two-chart models put a
/// single sample on each pole; rotationally symmetric models use v = 0.
inline std::vector<ChartPoint> sampling_grid(const SurfaceModel& model, int resolution) {
  if (resolution < 2) throw std::invalid_argument("sampling_grid: resolution too small");
  const detail::AtlasView a = detail::atlas_view(model);
  std::vector<ChartPoint> pts;
  const int n = resolution;
  if (a.one_dimensional) {
    for (int i = 0; i <= n; ++i) pts.push_back({i == n ? a.u_hi : a.u_lo + a.extent() * i / n, 0.0});
    return pts;
  }
  const double dv = (a.v_hi - a.v_lo) / n;
  if (a.charts == 2) {
    for (int i = 0; i <= n; ++i) {
      const double u = i == n ? a.u_hi : a.u_lo + a.extent() * i / n;  // endpoint exact, no roundoff overshoot
      const int nv = (i == 0 || i == n) ? 1 : n;
      for (int j = 0; j < nv; ++j) pts.push_back({u, a.v_lo + dv * j});
    }
    return pts;
  }
  for (int i = 0; i < n; ++i) {
    const double u = a.u_lo + a.extent() * (i + 0.5) / n;
    for (int j = 0; j < n; ++j) pts.push_back({u, a.v_lo + dv * (a.periodic_v ? j : j + 0.5)});
  }
  return pts;
}

namespace detail {

/// Local pattern search with quadratic (Newton) proposals; sign = +1
/// minimises kappa, -1 maximises it. Returns the point in chart 0.
inline std::pair<double, ChartPoint> refine_extremum(const AtlasView& a, ChartPoint start, double sign,
                                                     double cell) {
  auto [chart, p] = a.place(start);
  auto obj = [&](int c, ChartPoint q) { return sign * a.kappa(c, q); };
  double lo = a.u_lo, hi = a.u_hi;
  if (a.charts == 1 && a.degenerate_u_ends && !a.one_dimensional) lo += 0.5 * cell, hi -= 0.5 * cell;
  auto admissible = [&](ChartPoint q) {
    if (a.charts == 2) return std::sin(q.u) > 0.05;
    return q.u >= lo && q.u <= hi && (a.periodic_v || (q.v >= a.v_lo && q.v <= a.v_hi));
  };
  double best = obj(chart, p);
  double delta = cell;
  for (int it = 0; it < 400 && delta > 1e-11; ++it) {
    if (a.charts == 2 && std::sin(p.u) < 0.3) {
      p = a.transfer(chart, p);
      chart = 1 - chart;
    }
    const int nj = a.one_dimensional ? 0 : 1;
    double f[3][3];
    ChartPoint cand = p;
    double cand_val = best;
    bool full = true;
    for (int i = -1; i <= 1; ++i)
      for (int j = -nj; j <= nj; ++j) {
        const ChartPoint q{p.u + i * delta, p.v + j * delta};
        if (!admissible(q)) {
          full = false;
          f[i + 1][j + 1] = NAN;
          continue;
        }
        const double val = (i == 0 && j == 0) ? best : obj(chart, q);
        f[i + 1][j + 1] = val;
        if (val < cand_val) cand_val = val, cand = q;
      }
    if (full) {
      const double gu = (f[2][1] - f[0][1]) / (2 * delta);
      const double huu = (f[2][1] - 2 * f[1][1] + f[0][1]) / (delta * delta);
      Eigen::Vector2d step = Eigen::Vector2d::Zero();
      bool ok = false;
      if (a.one_dimensional) {
        if (huu > 0) step(0) = -gu / huu, ok = true;
      } else {
        const double gv = (f[1][2] - f[1][0]) / (2 * delta);
        const double hvv = (f[1][2] - 2 * f[1][1] + f[1][0]) / (delta * delta);
        const double huv = (f[2][2] - f[2][0] - f[0][2] + f[0][0]) / (4 * delta * delta);
        Eigen::Matrix2d H;
        H << huu, huv, huv, hvv;
        if (huu > 0 && H.determinant() > 0) step = -H.inverse() * Eigen::Vector2d(gu, gv), ok = true;
      }
      if (ok) {
        const double len = step.cwiseAbs().maxCoeff();
        if (len > delta) step *= delta / len;
        const ChartPoint q{p.u + step(0), p.v + step(1)};
        if (admissible(q)) {
          const double val = obj(chart, q);
          if (val < cand_val) cand_val = val, cand = q;
        }
      }
    }
    if (cand_val < best) {
      best = cand_val;
      p = cand;
    } else {
      delta *= 0.25;
    }
  }
  return {sign * best, a.to_primary(chart, p)};
}

}  // namespace detail

inline CurvatureExtrema curvature_extrema(const SurfaceModel& model, int resolution) {
  if (resolution < 64) throw std::invalid_argument("curvature_extrema: resolution must be at least 64");
  const detail::AtlasView a = detail::atlas_view(model);
  const auto pts = sampling_grid(model, resolution);
  CurvatureExtrema e;
  e.kappa_min = INFINITY, e.kappa_max = -INFINITY;
  for (const auto& p : pts) {
    const auto [c, q] = a.place(p);
    const double k = a.kappa(c, q);
    if (!std::isfinite(k)) throw std::domain_error("curvature_extrema: non-finite curvature");
    if (k < e.kappa_min) e.kappa_min = k, e.argmin = p;
    if (k > e.kappa_max) e.kappa_max = k, e.argmax = p;
  }
  if (std::holds_alternative<RoundSphere>(model)) return e;
  const double cell = a.extent() / resolution;
  const auto [kmin, pmin] = detail::refine_extremum(a, e.argmin, 1.0, cell);
  const auto [kmax, pmax] = detail::refine_extremum(a, e.argmax, -1.0, cell);
  if (kmin < e.kappa_min) e.kappa_min = kmin, e.argmin = pmin;
  if (kmax > e.kappa_max) e.kappa_max = kmax, e.argmax = pmax;
  return e;
}

/// Integral of kappa dA by Gauss-Legendre in u and the trapezoid rule in a
/// periodic v (Gauss-Legendre otherwise).
inline double gauss_bonnet_integral(const SurfaceModel& model, int resolution) {
  const detail::AtlasView a = detail::atlas_view(model);
  if (const auto* rev = std::get_if<SurfaceOfRevolution>(&model)) {
    if (!rev->profile.closed()) throw std::logic_error("gauss_bonnet_integral: surface is not closed");
    const QuadratureRule g = gauss_legendre(resolution, a.u_lo, a.u_hi);
    double s = 0.0;
    for (int i = 0; i < resolution; ++i) {
      const RevolutionPointData d = revolution_point_data(rev->profile, g.nodes[i]);
      s += g.weights[i] * d.kappa * d.area_density;
    }
    return 2.0 * std::numbers::pi * s;
  }
  if (const auto* par = std::get_if<ParametricSurface>(&model); par && !par->closed)
    throw std::logic_error("gauss_bonnet_integral: surface is not closed");
  const QuadratureRule gu = gauss_legendre(resolution, a.u_lo, a.u_hi);
  QuadratureRule gv;
  if (a.periodic_v) {
    for (int j = 0; j < resolution; ++j) {
      gv.nodes.push_back(a.v_lo + (a.v_hi - a.v_lo) * j / resolution);
      gv.weights.push_back((a.v_hi - a.v_lo) / resolution);
    }
  } else {
    gv = gauss_legendre(resolution, a.v_lo, a.v_hi);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < gu.nodes.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < gv.nodes.size(); ++j) {
      const ChartPoint p{gu.nodes[i], gv.nodes[j]};
      row += gv.weights[j] * a.kappa(0, p) * std::sqrt(a.metric(0, p).det());
    }
    s += gu.weights[i] * row;
  }
  return s;
}

/// Model with curvature extrema cached at construction.
class Surface {
 public:
  explicit Surface(SurfaceModel model, int resolution = 512) : model_(std::move(model)) {
    extrema_ = curvature_extrema(model_, resolution);
    if (!(extrema_.kappa_min > 0.0))
      throw std::invalid_argument("Surface: Gaussian curvature is not strictly positive (min " +
                                  std::to_string(extrema_.kappa_min) + ")");
    if (const auto* rev = std::get_if<SurfaceOfRevolution>(&model_); rev && !rev->profile.closed())
      throw std::invalid_argument("Surface: profile does not close up");
  }

  const SurfaceModel& model() const { return model_; }
  operator const SurfaceModel&() const { return model_; }
  double kappa_min() const { return extrema_.kappa_min; }
  double kappa_max() const { return extrema_.kappa_max; }
  const CurvatureExtrema& extrema() const { return extrema_; }
  std::string kind() const { return model_kind(model_); }

 private:
  SurfaceModel model_;
  CurvatureExtrema extrema_;
};

struct CurvatureSample {
  ChartPoint point;  // primary chart coordinates
  int chart = 0;     // chart in which metric data below are expressed
  ChartPoint chart_point;
  Eigen::Matrix2d metric, inverse;
  Christoffel christoffel;
  double kappa = 0.0;
  Eigen::Vector2d grad_kappa = Eigen::Vector2d::Zero();  // d kappa / d(u, v) in that chart
  double delta_log_kappa = 0.0;
  double kappa_min = 0.0, kappa_max = 0.0;
};

inline CurvatureSample curvature_sample(const Surface& surface, ChartPoint p, const FdOptions& opts = {}) {
  const SurfaceModel& model = surface.model();
  const detail::AtlasView a = detail::atlas_view(model);
  detail::check_point(a, p);
  const auto [chart, q] = a.place(p);
  const MetricJet m = a.metric(chart, q);
  if (!(m.det() > 0.0) || !(m.E > 0.0))
    throw std::domain_error("curvature_sample: metric degenerates at this chart point");
  CurvatureSample s;
  s.point = p;
  s.chart = chart;
  s.chart_point = q;
  s.metric = m.matrix();
  s.inverse = s.metric.inverse();
  s.christoffel = christoffel(m);
  s.kappa = gaussian_curvature(model, p);
  s.delta_log_kappa = delta_log_kappa(model, p, opts);
  if (const auto* rev = std::get_if<SurfaceOfRevolution>(&model)) {
    s.grad_kappa(0) = revolution_point_data(rev->profile, p.u).dkappa_dx;
  } else if (!std::holds_alternative<RoundSphere>(model)) {
    const double h = detail::fd_step(a, opts);
    s.grad_kappa(0) = (a.kappa(chart, {q.u + h, q.v}) - a.kappa(chart, {q.u - h, q.v})) / (2 * h);
    s.grad_kappa(1) = (a.kappa(chart, {q.u, q.v + h}) - a.kappa(chart, {q.u, q.v - h})) / (2 * h);
  }
  s.kappa_min = surface.kappa_min();
  s.kappa_max = surface.kappa_max();
  return s;
}

inline ParametricSurface ParametricSurface::conformal_sphere(std::vector<double> chebyshev) {
  const EllipsoidAtlas atlas{1.0, 1.0, 1.0};
  ParametricSurface s;
  s.family = "conformal_sphere";
  s.coefficients = chebyshev;
  s.closed = true;
  for (int c = 0; c < 2; ++c) {
    ParametricChart ch;
    ch.u_lo = 0.0, ch.u_hi = std::numbers::pi;
    ch.v_lo = -std::numbers::pi, ch.v_hi = std::numbers::pi;
    ch.periodic_v = true;
    ch.metric = [atlas, chebyshev, c](ChartPoint p) {
      const EmbeddingJet e = atlas.embedding(c, p);
      const MetricJet m0 = metric_from_embedding(e);
      const double zu = e.Xu.z(), zv = e.Xv.z();
      const auto [phi, d1, d2] = detail::chebyshev_series(chebyshev, e.X.z());
      const double w = std::exp(2.0 * phi);
      const double a2 = 4.0 * d1 * d1 + 2.0 * d2;
      return conformal_scale(m0, {w, w * 2.0 * d1 * zu, w * 2.0 * d1 * zv,
                                  w * (a2 * zu * zu + 2.0 * d1 * e.Xuu.z()),
                                  w * (a2 * zu * zv + 2.0 * d1 * e.Xuv.z()),
                                  w * (a2 * zv * zv + 2.0 * d1 * e.Xvv.z())});
    };
    s.charts.push_back(ch);
  }
  s.transfer = [atlas](int from, ChartPoint p) { return atlas.transfer(from, p); };
  s.preferred_chart = [atlas](ChartPoint p) { return atlas.preferred_chart(p); };
  return s;
}

inline ParametricSurface ParametricSurface::revolution_chart(const ProfileCurve& profile) {
  ParametricSurface s;
  s.family = "revolution_chart";
  s.coefficients = {profile.parameter(), profile.scale()};
  s.closed = profile.closed();
  ParametricChart ch;
  ch.u_lo = profile.x_lo(), ch.u_hi = profile.x_hi();
  ch.v_lo = -std::numbers::pi, ch.v_hi = std::numbers::pi;
  ch.periodic_v = true;
  ch.metric = [profile](ChartPoint p) { return detail::revolution_metric(profile, p.u); };
  s.charts.push_back(ch);
  return s;
}

}  // namespace gapkit
