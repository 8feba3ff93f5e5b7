#pragma once
// Separated-variable oracle for Dirichlet eigenvalues of rotationally symmetric
// caps: u'' + (f'/f) u' + (lambda - m^2/f^2) u = 0 on (0, r0), u(r0) = 0.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "gapkit/radial_profile.hpp"

namespace gapkit {

struct RadialMode {
  int m = 0;
  double lambda = 0.0;
  std::vector<double> r, u;  // ground-state profile, max |u| = 1
  int interior_zeros = 0;
};

struct RadialOracleResult {
  double lambda1 = 0.0;  // m = 0
  double lambda2 = 0.0;  // m = 1
  RadialMode mode0, mode1;
  double tolerance = 0.0;
};

namespace detail {

struct ShotResult {
  double end = 0.0;  // u(r0)
  std::vector<double> r, u;
};

/// Integrates from the pole series start at r = s to r0.
inline ShotResult shoot(const RadialProfile& rp, double r0, int m, double lambda, bool keep = false) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const double s = 1e-3 * r0;
  // u = 1 - lambda r^2/4 (m = 0) or u = r - (lambda + 4a) r^3/8 (m = 1, f = r + a r^3 + ...)
  const double a = -rp.kappa(0.0) / 6.0;
  State y;
  if (m == 0) y = {1.0 - lambda * s * s / 4.0, -lambda * s / 2.0};
  else {
    const double c = -(lambda + 4.0 * a) / 8.0;
    y = {s + c * s * s * s, 1.0 + 3.0 * c * s * s};
  }
  const double m2 = static_cast<double>(m * m);
  auto rhs = [&](const State& x, State& dx, double r) {
    const double f = rp.f(r), fp = rp.df(r);
    dx[0] = x[1];
    dx[1] = -(fp / f) * x[1] - (lambda - m2 / (f * f)) * x[0];
  };
  ShotResult out;
  auto stepper = ode::make_dense_output(1e-12, 1e-12, ode::runge_kutta_dopri5<State>());
  if (keep) {
    const int n = 400;
    std::vector<double> times;
    for (int i = 0; i <= n; ++i) times.push_back(s + (r0 - s) * i / n);
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), (r0 - s) / 200,
                         [&](const State& x, double r) {
                           out.r.push_back(r);
                           out.u.push_back(x[0]);
                         });
  } else {
    ode::integrate_const(stepper, rhs, y, s, r0, (r0 - s) / 64);
  }
  out.end = y[0];
  return out;
}

inline RadialMode ground_mode(const RadialProfile& rp, double r0, int m, double rel_tol) {
  // First sign change of u(r0; lambda) in a geometric sweep, then TOMS 748.
  auto F = [&](double lam) { return shoot(rp, r0, m, lam).end; };
  double lo = 0.05 / (r0 * r0);
  double flo = F(lo);
  if (!(flo > 0.0)) throw std::runtime_error("radial_oracle: bracket failure (u(r0) <= 0 at the sweep start)");
  double hi = lo, fhi = flo;
  for (int k = 0; k < 400 && fhi > 0.0; ++k) {
    lo = hi, flo = fhi;
    hi = lo * 1.05;
    fhi = F(hi);
  }
  if (fhi > 0.0) throw std::runtime_error("radial_oracle: bracket failure (no sign change)");
  boost::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      F, lo, hi, flo, fhi, [rel_tol](double x, double y) { return std::abs(x - y) <= rel_tol * std::abs(x); }, iters);
  RadialMode mode;
  mode.m = m;
  mode.lambda = 0.5 * (root.first + root.second);
  const ShotResult sh = shoot(rp, r0, m, mode.lambda, true);
  mode.r = sh.r;
  mode.u = sh.u;
  double mx = 0.0;
  for (double v : mode.u) mx = std::max(mx, std::abs(v));
  for (double& v : mode.u) v /= mx;
  for (std::size_t i = 0; i + 2 < mode.u.size(); ++i)
    if (mode.u[i] * mode.u[i + 1] < 0.0) ++mode.interior_zeros;
  return mode;
}

}  // namespace detail

/// m = 0 and m = 1 ground eigenvalues of the cap of radius r0.
inline RadialOracleResult radial_oracle(const RadialProfile& rp, double r0, double rel_tol = 1e-12) {
  if (!(r0 > 0.0) || !(r0 < rp.r_max())) throw std::invalid_argument("radial_oracle: r0 outside the profile domain");
  if (rp.df(r0) < -1e-12) throw std::invalid_argument("radial_oracle: cap is not convex");
  RadialOracleResult out;
  out.tolerance = rel_tol;
  out.mode0 = detail::ground_mode(rp, r0, 0, rel_tol);
  out.mode1 = detail::ground_mode(rp, r0, 1, rel_tol);
  out.lambda1 = out.mode0.lambda;
  out.lambda2 = out.mode1.lambda;
  if (!(out.lambda1 < out.lambda2)) throw std::logic_error("radial_oracle: modes out of order");
  return out;
}

/// n-th positive zero of the Bessel function J_m by bisection on its power series.
inline double bessel_zero(int m, int n) {
  auto J = [m](double x) {
    // sum (-1)^k (x/2)^(2k+m) / (k! (k+m)!)
    double term = 1.0;
    for (int i = 1; i <= m; ++i) term *= 0.5 * x / i;
    double s = term;
    for (int k = 1; k < 200; ++k) {
      term *= -(0.25 * x * x) / (k * (k + m));
      s += term;
      if (std::abs(term) < 1e-17 * std::abs(s)) break;
    }
    return s;
  };
  int found = 0;
  double step = 0.05, a = (m == 0 ? 0.0 : 1e-3), fa = J(a);
  for (double b = a + step;; b += step) {
    const double fb = J(b);
    if (fa * fb < 0.0 && ++found == n) {
      for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        const double c = 0.5 * (a + b), fc = J(c);
        if ((fc < 0.0) == (fa < 0.0)) a = c, fa = fc;
        else b = c;
      }
      return 0.5 * (a + b);
    }
    a = b, fa = fb;
    if (b > 100.0) throw std::runtime_error("bessel_zero: not found");
  }
}

}  // namespace gapkit
