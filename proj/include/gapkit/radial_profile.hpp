#pragma once
// Rotationally symmetric metric dr^2 + f(r)^2 dtheta^2 around a pole, and the
// induced metric on geodesic normal coordinates p = r (cos theta, sin theta):
//   g(p) = I + beta(r) T(p),  beta = ((f/r)^2 - 1)/r^2,  T = [[b^2, -ab], [-ab, a^2]].

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gapkit/geometry.hpp"
#include "gapkit/profile.hpp"

namespace gapkit {

class RadialProfile {
 public:
  enum class Kind { Flat, Sphere, Table };

  /// Euclidean plane, f = r.
  static RadialProfile flat() {
    RadialProfile p;
    p.kind_ = Kind::Flat;
    p.r_max_ = std::numeric_limits<double>::infinity();
    return p;
  }

  /// Round sphere of radius R, f = R sin(r/R), centred at a pole.
  static RadialProfile sphere(double R) {
    if (!(R > 0.0)) throw std::invalid_argument("RadialProfile::sphere: radius must be positive");
    RadialProfile p;
    p.kind_ = Kind::Sphere;
    p.R_ = R;
    p.r_max_ = std::numbers::pi * R;
    return p;
  }

  /// Surface of revolution, centred at the pole x = x_lo of a closed profile.
  /// Arclength data come from integrating the meridian
  ///   dX/dr = 2F / sqrt(4F^2 + q'(X)^2),  dF/dr = q'(X) / sqrt(4F^2 + q'(X)^2),
  /// which is regular at the pole (F = 0, q' > 0).
  static RadialProfile revolution(const ProfileCurve& profile, int steps = 20000) {
    if (!profile.closed()) throw std::invalid_argument("RadialProfile::revolution: profile must close at x_lo");
    RadialProfile p;
    p.kind_ = Kind::Table;
    p.profile_ = profile;
    const double xl = profile.x_lo(), xh = profile.x_hi();
    // The meridian is shorter than the half-perimeter of its bounding box.
    double Fmax = 0.0;
    for (int i = 0; i <= 256; ++i) Fmax = std::max(Fmax, std::sqrt(std::max(0.0, profile.squared(xl + (xh - xl) * i / 256)[0])));
    const double h = ((xh - xl) + 2.0 * Fmax) / steps;
    p.h_ = h;
    auto rhs = [&](const Eigen::Vector3d& s) {
      const double X = std::clamp(s(0), xl, xh);
      const double F = s(1);
      const double qp = profile.squared(X)[1];
      const double D = std::sqrt(4.0 * F * F + qp * qp);
      const double dY = qp > 0.0 ? -4.0 * F * F / (D * (qp + D)) : qp / D - 1.0;
      return Eigen::Vector3d(2.0 * F / D, qp / D, dY);
    };
    Eigen::Vector3d s(xl, 0.0, 0.0);
    auto push = [&](const Eigen::Vector3d& st) {
      const Eigen::Vector3d d = rhs(st);
      p.X_.push_back(st(0)), p.F_.push_back(st(1)), p.Y_.push_back(st(2));
      p.dX_.push_back(d(0)), p.dF_.push_back(d(1)), p.dY_.push_back(d(2));
      p.ddF_.push_back(-revolution_kappa_at(profile, std::clamp(st(0), xl, xh)) * st(1));
    };
    push(s);
    for (int i = 0; i < 4 * steps; ++i) {
      const Eigen::Vector3d k1 = rhs(s);
      const Eigen::Vector3d k2 = rhs(s + 0.5 * h * k1);
      const Eigen::Vector3d k3 = rhs(s + 0.5 * h * k2);
      const Eigen::Vector3d k4 = rhs(s + h * k3);
      const Eigen::Vector3d next = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!(next(1) > 0.0) || next(0) >= xh) {
        p.r_max_ = h * (p.X_.size() - 1) + h * s(1) / std::max(s(1) - next(1), 1e-300);
        break;
      }
      s = next;
      push(s);
    }
    if (!std::isfinite(p.r_max_)) throw std::runtime_error("RadialProfile::revolution: meridian did not close");
    p.ddX_.resize(p.X_.size());
    for (std::size_t i = 0; i < p.X_.size(); ++i) {
      // X'' from differentiating 2F/D along the meridian
      const Jet<4> q = profile.squared(std::clamp(p.X_[i], xl, xh));
      const double F = p.F_[i], qp = q[1];
      const double D = std::sqrt(4.0 * F * F + qp * qp);
      const double dD = (4.0 * F * p.dF_[i] + qp * q[2] * p.dX_[i]) / D;
      p.ddX_[i] = (2.0 * p.dF_[i] * D - 2.0 * F * dD) / (D * D);
    }
    // pole series f/r = 1 + a r^2 + b r^4 with a = -k0/6, b = (k0^2 - 3 k''(0))/120
    const auto pole = revolution_point_data(profile, xl);
    const double k2 = 2.0 * pole.dkappa_dx / profile.squared(xl)[1];
    p.a_ = -pole.kappa / 6.0;
    p.b_ = (pole.kappa * pole.kappa - 3.0 * k2) / 120.0;
    return p;
  }

  Kind kind() const { return kind_; }
  double r_max() const { return r_max_; }
  const std::optional<ProfileCurve>& profile() const { return profile_; }
  double radius() const { return R_; }

  double f(double r) const {
    switch (kind_) {
      case Kind::Flat: return r;
      case Kind::Sphere: return R_ * std::sin(r / R_);
      case Kind::Table: return interp(F_, dF_, r);
    }
    return 0.0;
  }
  double df(double r) const {
    switch (kind_) {
      case Kind::Flat: return 1.0;
      case Kind::Sphere: return std::cos(r / R_);
      case Kind::Table: return interp(dF_, ddF_, r);
    }
    return 0.0;
  }
  double ddf(double r) const { return -kappa(r) * f(r); }

  /// Position of the point at distance r along the meridian (x coordinate of the profile).
  double x_of_r(double r) const {
    if (kind_ != Kind::Table) throw std::logic_error("x_of_r: only defined for revolution profiles");
    return interp(X_, dX_, r);
  }

  double kappa(double r) const {
    switch (kind_) {
      case Kind::Flat: return 0.0;
      case Kind::Sphere: return 1.0 / (R_ * R_);
      case Kind::Table: return revolution_kappa_at(*profile_, x_of_r(r));
    }
    return 0.0;
  }
  double dkappa(double r) const {
    if (kind_ != Kind::Table) return 0.0;
    return revolution_point_data(*profile_, x_of_r(r)).dkappa_dx * interp(dX_, ddX_, r);
  }
  double delta_kappa(double r) const {
    if (kind_ != Kind::Table) return 0.0;
    return revolution_point_data(*profile_, x_of_r(r)).delta_kappa;
  }
  double delta_log_kappa(double r) const {
    if (kind_ != Kind::Table) return 0.0;
    return revolution_point_data(*profile_, x_of_r(r)).delta_log_kappa;
  }

  double beta(double r) const {
    switch (kind_) {
      case Kind::Flat: return 0.0;
      case Kind::Sphere: {
        const double s = r / R_, s2 = s * s;
        if (s < 0.1) return (-1.0 / 3.0 + s2 * (2.0 / 45.0 + s2 * (-1.0 / 315.0 + s2 * 2.0 / 14175.0))) / (R_ * R_);
        const double sn = std::sin(s);
        return (sn * sn - s2) / (s2 * s2) / (R_ * R_);
      }
      case Kind::Table: {
        if (r < kSeries) return 2.0 * a_ + (a_ * a_ + 2.0 * b_) * r * r;
        const double y = interp(Y_, dY_, r);
        return y * (2.0 * r + y) / (r * r * r * r);
      }
    }
    return 0.0;
  }

  /// beta'(r)/r, finite at r = 0.
  double dbeta_over_r(double r) const {
    switch (kind_) {
      case Kind::Flat: return 0.0;
      case Kind::Sphere: {
        const double s = r / R_, s2 = s * s;
        if (s < 0.1) return (4.0 / 45.0 + s2 * (-4.0 / 315.0 + s2 * 12.0 / 14175.0)) / (R_ * R_ * R_ * R_);
        const double sn = std::sin(s);
        const double dB = (std::sin(2.0 * s) - 2.0 * s) / (s2 * s2) - 4.0 * (sn * sn - s2) / (s2 * s2 * s);
        return dB / (s * R_ * R_ * R_ * R_);
      }
      case Kind::Table: {
        if (r < kSeries) return 2.0 * (a_ * a_ + 2.0 * b_);
        const double y = interp(Y_, dY_, r);
        const double yp = interp(dY_, ddF_, r);
        const double r4 = r * r * r * r;
        const double db = (yp * (2.0 * r + y) + y * (2.0 + yp)) / r4 - 4.0 * y * (2.0 * r + y) / (r4 * r);
        return db / r;
      }
    }
    return 0.0;
  }

  Eigen::Vector3d embed(double r, double theta) const {
    switch (kind_) {
      case Kind::Flat: return {r * std::cos(theta), r * std::sin(theta), 0.0};
      case Kind::Sphere: {
        const double s = R_ * std::sin(r / R_);
        return {s * std::cos(theta), s * std::sin(theta), R_ * std::cos(r / R_)};
      }
      case Kind::Table: {
        const double F = f(r);
        return {x_of_r(r), F * std::cos(theta), F * std::sin(theta)};
      }
    }
    return {};
  }

 private:
  static constexpr double kSeries = 4e-3;

  double interp(const std::vector<double>& y, const std::vector<double>& dy, double r) const {
    if (!(r >= 0.0)) throw std::out_of_range("RadialProfile: negative radius");
    const double t_all = r / h_;
    std::size_t i = static_cast<std::size_t>(t_all);
    if (i + 1 >= y.size()) {
      if (i + 1 == y.size() && t_all - i < 1e-9) return y[i];
      throw std::out_of_range("RadialProfile: radius beyond the meridian table");
    }
    const double t = t_all - i, t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h_ * dy[i] + (-2 * t3 + 3 * t2) * y[i + 1] +
           (t3 - t2) * h_ * dy[i + 1];
  }

  Kind kind_ = Kind::Flat;
  double R_ = 1.0;
  double r_max_ = std::numeric_limits<double>::infinity();
  std::optional<ProfileCurve> profile_;
  std::vector<double> X_, F_, Y_, dX_, dF_, dY_, ddF_;
  std::vector<double> ddX_;
  double h_ = 1.0;
  double a_ = 0.0, b_ = 0.0;
};

/// Metric of geodesic normal coordinates with first derivatives.
inline MetricJet cap_metric(const RadialProfile& rp, const Eigen::Vector2d& p) {
  const double a = p(0), b = p(1);
  const double r = p.norm();
  const double be = rp.beta(r);
  const double q = rp.dbeta_over_r(r);
  const double ba = q * a, bb = q * b;  // d beta / da, d beta / db
  MetricJet m;
  m.E = 1.0 + be * b * b;
  m.F = -be * a * b;
  m.G = 1.0 + be * a * a;
  m.Eu = ba * b * b;
  m.Ev = bb * b * b + 2.0 * be * b;
  m.Fu = -ba * a * b - be * b;
  m.Fv = -bb * a * b - be * a;
  m.Gu = ba * a * a + 2.0 * be * a;
  m.Gv = bb * a * a;
  return m;
}

inline Eigen::Matrix2d cap_metric_matrix(const RadialProfile& rp, const Eigen::Vector2d& p) {
  const double be = rp.beta(p.norm());
  Eigen::Matrix2d g;
  g << 1.0 + be * p(1) * p(1), -be * p(0) * p(1), -be * p(0) * p(1), 1.0 + be * p(0) * p(0);
  return g;
}

}  // namespace gapkit
