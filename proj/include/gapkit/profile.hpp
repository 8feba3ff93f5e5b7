#pragma once
// Profile curves of surfaces of revolution and their curvature formulas.
//
// The surface is swept by rotating the graph y = F(x), x in [x_lo, x_hi], about
// the x-axis. The profile is stored through q = F^2, which stays smooth where F
// closes up at a pole (F' is infinite there, q' is not).

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "gapkit/jet.hpp"

namespace gapkit {

class ProfileCurve {
 public:
  using SquaredJet = std::function<Jet<4>(double x)>;

  ProfileCurve(SquaredJet q, double x_lo, double x_hi, std::string family = "custom",
               double parameter = 0.0)
      : q_(std::move(q)), x_lo_(x_lo), x_hi_(x_hi), family_(std::move(family)), parameter_(parameter) {
    if (!(x_hi_ > x_lo_)) throw std::invalid_argument("ProfileCurve: empty interval");
    const int n = 1024;
    for (int i = 1; i < n; ++i) {
      const double x = x_lo_ + (x_hi_ - x_lo_) * i / n;
      if (!(q_(x)[0] > 0.0)) throw std::invalid_argument("ProfileCurve: F vanishes inside the interval");
    }
    const Jet<4> lo = q_(x_lo_), hi = q_(x_hi_);
    const double scale = std::max(1.0, std::abs(q_(0.5 * (x_lo_ + x_hi_))[0]));
    closed_ = std::abs(lo[0]) <= 1e-12 * scale && std::abs(hi[0]) <= 1e-12 * scale;
    if (closed_ && !(lo[1] > 0.0 && hi[1] < 0.0))
      throw std::invalid_argument("ProfileCurve: endpoints are not regular poles");
  }

  /// Ellipsoid of revolution, F(x) = (1 - x^2/eps^2)^(1/2) on [-eps, eps].
  static ProfileCurve ellipsoid(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("ProfileCurve::ellipsoid: eps must be positive");
    const double k = 1.0 / (eps * eps);
    return ProfileCurve(
        [k](double x) {
          Jet<4> j;
          j.d = {1.0 - k * x * x, -2.0 * k * x, -2.0 * k, 0.0, 0.0};
          return j;
        },
        -eps, eps, "revolution_ellipsoid", eps);
  }

  /// Round sphere of the given radius written as a profile.
  static ProfileCurve sphere(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ProfileCurve::sphere: radius must be positive");
    const double r2 = radius * radius;
    return ProfileCurve(
        [r2](double x) {
          Jet<4> j;
          j.d = {r2 - x * x, -2.0 * x, -2.0, 0.0, 0.0};
          return j;
        },
        -radius, radius, "sphere", radius);
  }

  /// Profile of the surface whose metric is rho^2 times this one.
  ProfileCurve scaled(double rho) const {
    if (!(rho > 0.0)) throw std::invalid_argument("ProfileCurve::scaled: rho must be positive");
    auto q = q_;
    ProfileCurve out(
        [q, rho](double x) {
          Jet<4> j = q(x / rho);
          double f = rho * rho;
          for (auto& d : j.d) d *= f, f /= rho;
          return j;
        },
        rho * x_lo_, rho * x_hi_, family_, parameter_);
    out.scale_ = scale_ * rho;
    return out;
  }

  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  bool closed() const { return closed_; }
  const std::string& family() const { return family_; }
  double parameter() const { return parameter_; }
  /// Accumulated metric scale factor applied through scaled().
  double scale() const { return scale_; }

  bool contains(double x) const { return x >= x_lo_ && x <= x_hi_; }

  Jet<4> squared(double x) const {
    if (!contains(x)) throw std::out_of_range("ProfileCurve: x outside the profile interval");
    return q_(x);
  }

  /// F and its x-derivatives; requires F(x) > 0.
  Jet<4> height(double x) const {
    const Jet<4> q = squared(x);
    if (!(q[0] > 0.0)) throw std::domain_error("ProfileCurve: F vanishes at this point");
    return sqrt(q);
  }

  /// ds/dx = sqrt(1 + F'^2) written through q so it is finite wherever F > 0.
  double ds_dx(double x) const {
    const Jet<4> q = squared(x);
    if (!(q[0] > 0.0)) return INFINITY;
    return std::sqrt(4.0 * q[0] + q[1] * q[1]) / (2.0 * std::sqrt(q[0]));
  }

  /// f and its first four derivatives with respect to arclength r at the point
  /// r(x), from the chain rule d/dr = (1/s) d/dx with s = ds/dx.
  Jet<4> arclength_jet(double x) const {
    const Jet<4> F = height(x);
    const Jet<3> Fp = F.derivative();
    const Jet<3> w = reciprocal(sqrt(1.0 + Fp * Fp));
    const Jet<3> g1 = w * Fp;
    const Jet<2> g2 = w.truncate<2>() * g1.derivative();
    const Jet<1> g3 = w.truncate<1>() * g2.derivative();
    const double g4 = w[0] * g3[1];
    Jet<4> f;
    f.d = {F[0], g1[0], g2[0], g3[0], g4};
    return f;
  }

 private:
  SquaredJet q_;
  double x_lo_, x_hi_;
  std::string family_;
  double parameter_;
  double scale_ = 1.0;
  bool closed_ = false;
};

/// kappa = -f''/f from an arclength jet. Accepts flat profiles (returns 0).
inline double revolution_kappa(const Jet<4>& f) { return -f[2] / f[0]; }

/// Closed-form Laplacian of log kappa for dr^2 + f^2 dtheta^2 from the
/// arclength jet of f (requires f'' != 0).
inline double revolution_delta_log_kappa(const Jet<4>& f) {
  const double r3 = f[3] / f[2];
  return f[4] / f[2] - r3 * r3 + f[1] * f[3] / (f[0] * f[2]) - f[2] / f[0];
}

/// Gaussian curvature from q = F^2: -4(2 q q'' - q'^2)/(4q + q'^2)^2, regular at poles.
inline double revolution_kappa_at(const ProfileCurve& profile, double x) {
  const Jet<4> q = profile.squared(x);
  const double D = 4.0 * q[0] + q[1] * q[1];
  return -4.0 * (2.0 * q[0] * q[2] - q[1] * q[1]) / (D * D);
}

/// Curvature data in the x variable that stay regular at the poles.
struct RevolutionPointData {
  double kappa = 0;
  double dkappa_dx = 0;
  double dkappa_dr = 0;
  double delta_kappa = 0;
  double delta_log_kappa = 0;
  double area_density = 0;  // dA = area_density dx dtheta
};

inline RevolutionPointData revolution_point_data(const ProfileCurve& profile, double x) {
  const Jet<4> q = profile.squared(x);
  const Jet<3> q1 = q.derivative();
  const Jet<2> q2 = q1.derivative();
  const Jet<3> D = 4.0 * q.truncate<3>() + q1 * q1;
  const Jet<2> N = 2.0 * q.truncate<2>() * q2 - q1.truncate<2>() * q1.truncate<2>();
  const Jet<2> D2 = D.truncate<2>() * D.truncate<2>();
  const Jet<2> kappa = -4.0 * (N / D2);
  if (!(kappa[0] > 0.0)) throw std::domain_error("revolution_point_data: curvature is not positive");
  const Jet<2> L = log(kappa);
  const Jet<1> sD = sqrt(D.truncate<1>());
  const Jet<1> P = 2.0 * (q.truncate<1>() / sD);
  const double Q = 0.5 * sD[0];
  RevolutionPointData out;
  out.kappa = kappa[0];
  out.dkappa_dx = kappa[1];
  out.dkappa_dr = q[0] > 0.0 ? kappa[1] * std::sqrt(q[0]) / Q : 0.0;
  out.delta_kappa = (P[1] * kappa[1] + P[0] * kappa[2]) / Q;
  out.delta_log_kappa = (P[1] * L[1] + P[0] * L[2]) / Q;
  out.area_density = Q;
  return out;
}

}  // namespace gapkit
