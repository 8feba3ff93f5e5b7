#pragma once
// Pointwise curvature conditions for log-concavity and first-eigenvalue lower bounds.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gapkit/surface.hpp"

namespace gapkit {

enum class ConditionKind { General, PinchedC0, PinchedCHalf, SpectralDominance, TriaxialQuantity };

enum class LambdaSource { User, Ling, Myers };

inline std::string to_string(ConditionKind k) {
  switch (k) {
    case ConditionKind::General: return "general";
    case ConditionKind::PinchedC0: return "pinched-C0";
    case ConditionKind::PinchedCHalf: return "pinched-Chalf";
    case ConditionKind::SpectralDominance: return "spectral-dominance";
    case ConditionKind::TriaxialQuantity: return "triaxial-quantity";
  }
  return "?";
}

inline ConditionKind condition_kind_from_string(const std::string& s) {
  for (auto k : {ConditionKind::General, ConditionKind::PinchedC0, ConditionKind::PinchedCHalf,
                 ConditionKind::SpectralDominance, ConditionKind::TriaxialQuantity})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown condition kind: " + s);
}

inline std::string to_string(LambdaSource s) {
  switch (s) {
    case LambdaSource::User: return "user";
    case LambdaSource::Ling: return "ling";
    case LambdaSource::Myers: return "myers";
  }
  return "?";
}

inline LambdaSource lambda_source_from_string(const std::string& s) {
  if (s == "user") return LambdaSource::User;
  if (s == "ling") return LambdaSource::Ling;
  if (s == "myers") return LambdaSource::Myers;
  throw std::invalid_argument("unknown lambda source: " + s);
}

struct ConditionSpec {
  ConditionKind kind = ConditionKind::General;
  double C = 0.0;
  double lambda_lb = 0.0;
  LambdaSource lambda_source = LambdaSource::User;
};

struct ConditionReport {
  ConditionSpec spec;
  int resolution = 0;
  std::vector<ChartPoint> points;
  std::vector<double> margins;
  double min_margin = 0.0;
  ChartPoint argmin;
  bool verdict = false;
  std::string implied;  // conclusion the condition yields when satisfied
  double identity_residual = 0.0;  // spectral-dominance vs general margin, relative
};

// ---- pure margins ---------------------------------------------------------

inline double general_margin(double dlk, double kappa, double lambda, double C) {
  return dlk + 4.0 * lambda - 5.0 * kappa - 4.0 * C * (C / kappa + 3.0);
}

/// Spectral-dominance margin: dlk - [(4/k)(k/2 - kmin/2)^2 - 4 lambda + 8 (k/2 - kmin/2)].
inline double spectral_dominance_margin(double dlk, double kappa, double kappa_min, double lambda) {
  const double b = 0.5 * kappa - 0.5 * kappa_min;
  return dlk - (4.0 / kappa * b * b - 4.0 * lambda + 8.0 * b);
}

inline double pinched_margin_c0(double dlk, double kappa, double kappa_min) {
  return dlk - 5.0 * kappa + 6.0 * kappa_min;
}

inline double pinched_margin_chalf(double dlk, double kappa, double kappa_min) {
  return dlk - 5.0 * kappa + 11.0 * kappa_min;
}

inline double triaxial_quantity(double dlk, double kappa, double kappa_min) {
  return dlk - 5.0 * kappa + 12.0 * kappa_min - kappa_min * kappa_min / kappa;
}

inline double condition_margin(const ConditionSpec& spec, double dlk, double kappa, double kappa_min) {
  switch (spec.kind) {
    case ConditionKind::General: return general_margin(dlk, kappa, spec.lambda_lb, spec.C);
    case ConditionKind::PinchedC0: return pinched_margin_c0(dlk, kappa, kappa_min);
    case ConditionKind::PinchedCHalf: return pinched_margin_chalf(dlk, kappa, kappa_min);
    case ConditionKind::SpectralDominance: return spectral_dominance_margin(dlk, kappa, kappa_min, spec.lambda_lb);
    case ConditionKind::TriaxialQuantity: return triaxial_quantity(dlk, kappa, kappa_min);
  }
  throw std::logic_error("condition_margin: bad kind");
}

// ---- eigenvalue lower bounds ----------------------------------------------

/// Ling: (n-1) kmin/2 + pi^2/d^2 with d the inscribed-ball diameter.
/// Myers: (n+1) kmin/2, independent of d.
inline double lambda_lower_bound(double kappa_min, double d, int n = 2, LambdaSource mode = LambdaSource::Myers) {
  if (n < 2) throw std::invalid_argument("lambda_lower_bound: n must be at least 2");
  if (mode == LambdaSource::Myers) {
    if (!(kappa_min > 0.0)) throw std::invalid_argument("lambda_lower_bound: kappa_min must be positive");
    return 0.5 * (n + 1) * kappa_min;
  }
  if (mode != LambdaSource::Ling) throw std::invalid_argument("lambda_lower_bound: user bounds are not computed");
  if (!(kappa_min >= 0.0)) throw std::invalid_argument("lambda_lower_bound: kappa_min must be nonnegative");
  if (!(d > 0.0)) throw std::invalid_argument("lambda_lower_bound: d must be positive");
  if (kappa_min > 0.0 && d >= std::numbers::pi / std::sqrt(kappa_min))
    throw std::domain_error("lambda_lower_bound: d >= pi/sqrt(kappa_min) contradicts the Myers diameter bound");
  return 0.5 * (n - 1) * kappa_min + std::numbers::pi * std::numbers::pi / (d * d);
}

// ---- grid evaluation ------------------------------------------------------

struct CurvatureGridSample {
  ChartPoint point;
  double kappa = 0.0;
  double delta_log_kappa = 0.0;
};

inline std::vector<CurvatureGridSample> curvature_grid(const SurfaceModel& model, int resolution) {
  std::vector<CurvatureGridSample> out;
  for (const auto& p : sampling_grid(model, resolution)) {
    const double k = gaussian_curvature(model, p);
    if (!(k > 0.0)) throw std::domain_error("non-positive curvature encountered on the grid");
    out.push_back({p, k, delta_log_kappa(model, p)});
  }
  return out;
}

inline std::string implied_conclusion(const ConditionSpec& s) {
  switch (s.kind) {
    case ConditionKind::General: return "Hess log u1 <= -(C + kappa/2) g";
    case ConditionKind::PinchedC0: return "Hess log u1 <= -(kappa/2) g";
    case ConditionKind::PinchedCHalf: return "Hess log u1 <= ((kappa_min - kappa)/2) g <= 0";
    case ConditionKind::SpectralDominance:
    case ConditionKind::TriaxialQuantity: return "Hess log u1 <= ((kappa_min - kappa)/2) g <= 0";
  }
  return "";
}

inline ConditionReport check_condition(const Surface& surface, const ConditionSpec& spec, int resolution) {
  if ((spec.kind == ConditionKind::General || spec.kind == ConditionKind::SpectralDominance) &&
      !(spec.lambda_lb > 0.0))
    throw std::invalid_argument("check_condition: lambda_lb must be positive");
  const auto grid = curvature_grid(surface, resolution);
  ConditionReport r;
  r.spec = spec;
  r.resolution = resolution;
  r.implied = implied_conclusion(spec);
  r.min_margin = INFINITY;
  const double kmin = surface.kappa_min();
  for (const auto& g : grid) {
    const double m = condition_margin(spec, g.delta_log_kappa, g.kappa, kmin);
    if (spec.kind == ConditionKind::SpectralDominance) {
      const double ref = general_margin(g.delta_log_kappa, g.kappa, spec.lambda_lb, -0.5 * kmin);
      const double scale = std::abs(g.delta_log_kappa) + 4.0 * spec.lambda_lb + 5.0 * g.kappa + 6.0 * kmin;
      r.identity_residual = std::max(r.identity_residual, std::abs(m - ref) / scale);
    }
    r.points.push_back(g.point);
    r.margins.push_back(m);
    if (m < r.min_margin) r.min_margin = m, r.argmin = g.point;
  }
  if (r.identity_residual > 1e-12)
    throw std::logic_error("spectral-dominance margin disagrees with the general margin at C = -kappa_min/2");
  r.verdict = r.min_margin > 0.0;
  return r;
}

inline ConditionReport check_condition_general(const Surface& surface, double C, double lambda_lb, int resolution,
                                               LambdaSource source = LambdaSource::User) {
  return check_condition(surface, {ConditionKind::General, C, lambda_lb, source}, resolution);
}

inline std::pair<ConditionReport, ConditionReport> check_pinched_conditions(const Surface& surface, int resolution) {
  ConditionReport a = check_condition(surface, {ConditionKind::PinchedC0, 0.0, 0.0, LambdaSource::Myers}, resolution);
  ConditionReport b = check_condition(
      surface, {ConditionKind::PinchedCHalf, -0.5 * surface.kappa_min(), 0.0, LambdaSource::Myers}, resolution);
  return {std::move(a), std::move(b)};
}

inline ConditionReport check_spectral_dominance(const Surface& surface, double lambda_lb, int resolution,
                                                LambdaSource source = LambdaSource::User) {
  return check_condition(surface, {ConditionKind::SpectralDominance, -0.5 * surface.kappa_min(), lambda_lb, source},
                         resolution);
}

inline ConditionReport check_triaxial_quantity(const Surface& surface, int resolution) {
  return check_condition(surface, {ConditionKind::TriaxialQuantity, -0.5 * surface.kappa_min(),
                                   1.5 * surface.kappa_min(), LambdaSource::Myers},
                         resolution);
}

/// Minimum margin at twice the resolution, for the refinement-stability re-check.
inline double refined_min_margin(const Surface& surface, const ConditionSpec& spec, int resolution) {
  return check_condition(surface, spec, 2 * resolution).min_margin;
}

// ---- threshold search -----------------------------------------------------

struct ThresholdResult {
  double parameter = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool monotone_near_root = false;
  std::vector<std::pair<double, double>> sweep;
};

/// Sweeps margin(p) over [lo, hi], brackets the first sign change and bisects
/// it to width tol.
inline ThresholdResult threshold_solve(const std::function<double(double)>& margin, double lo, double hi,
                                       int samples = 64, double tol = 1e-6) {
  if (!(hi > lo) || samples < 2) throw std::invalid_argument("threshold_solve: bad sweep");
  ThresholdResult r;
  for (int i = 0; i <= samples; ++i) {
    const double p = lo + (hi - lo) * i / samples;
    r.sweep.emplace_back(p, margin(p));
  }
  int k = -1;
  for (int i = 0; i < samples; ++i)
    if ((r.sweep[i].second > 0.0) != (r.sweep[i + 1].second > 0.0)) {
      k = i;
      break;
    }
  if (k < 0) throw std::runtime_error("threshold_solve: no sign change in the sweep range");
  {
    // monotone over the neighbouring samples
    const int i0 = std::max(0, k - 2), i1 = std::min(samples, k + 3);
    const double s = r.sweep[k + 1].second - r.sweep[k].second;
    r.monotone_near_root = true;
    for (int i = i0; i < i1; ++i)
      if ((r.sweep[i + 1].second - r.sweep[i].second) * s < 0.0) r.monotone_near_root = false;
  }
  double a = r.sweep[k].first, b = r.sweep[k + 1].first;
  const bool fa_pos = r.sweep[k].second > 0.0;
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    if ((margin(m) > 0.0) == fa_pos) a = m;
    else b = m;
  }
  r.bracket_lo = a, r.bracket_hi = b;
  r.parameter = 0.5 * (a + b);
  return r;
}

/// Value of dlk - 5 kappa at the maximal-curvature circle of the eps-ellipsoid
/// of revolution, -eps^-2 - 4 eps^-4.
inline double ellipsoid_pole_value(double eps) {
  const double e2 = eps * eps;
  return -1.0 / e2 - 4.0 / (e2 * e2);
}

}  // namespace gapkit
