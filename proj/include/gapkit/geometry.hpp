#pragma once
// Chart-level differential geometry for two-dimensional metrics.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace gapkit {

/// Parameter coordinates on a chart.
struct ChartPoint {
  double u = 0.0;
  double v = 0.0;
};

/// First fundamental form with exact first and second partial derivatives.
struct MetricJet {
  double E = 1, F = 0, G = 1;
  double Eu = 0, Ev = 0, Fu = 0, Fv = 0, Gu = 0, Gv = 0;
  double Euu = 0, Euv = 0, Evv = 0;
  double Fuu = 0, Fuv = 0, Fvv = 0;
  double Guu = 0, Guv = 0, Gvv = 0;

  Eigen::Matrix2d matrix() const { return (Eigen::Matrix2d() << E, F, F, G).finished(); }
  double det() const { return E * G - F * F; }
};

/// Christoffel symbols of the second kind, gamma[k][i][j] = Gamma^k_ij.
struct Christoffel {
  std::array<std::array<std::array<double, 2>, 2>, 2> gamma{};
  double operator()(int k, int i, int j) const { return gamma[k][i][j]; }
};

inline Christoffel christoffel(const MetricJet& m) {
  // Lowered symbols Gamma_{ij,l} = (d_i g_jl + d_j g_il - d_l g_ij)/2, index 0 = u, 1 = v.
  const double dg[2][2][2] = {
      // dg[l][i][j] = d_l g_ij
      {{m.Eu, m.Fu}, {m.Fu, m.Gu}},
      {{m.Ev, m.Fv}, {m.Fv, m.Gv}},
  };
  const double det = m.det();
  if (!(det > 0.0)) throw std::domain_error("christoffel: metric is not positive definite");
  const double inv[2][2] = {{m.G / det, -m.F / det}, {-m.F / det, m.E / det}};
  Christoffel c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double lowered[2];
      for (int l = 0; l < 2; ++l) lowered[l] = 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
      for (int k = 0; k < 2; ++k) c.gamma[k][i][j] = inv[k][0] * lowered[0] + inv[k][1] * lowered[1];
    }
  return c;
}

/// Gaussian curvature from the first fundamental form (Brioschi formula).
inline double brioschi_curvature(const MetricJet& m) {
  const Eigen::Matrix3d a = (Eigen::Matrix3d() <<
      -0.5 * m.Evv + m.Fuv - 0.5 * m.Guu, 0.5 * m.Eu, m.Fu - 0.5 * m.Ev,
      m.Fv - 0.5 * m.Gu, m.E, m.F,
      0.5 * m.Gv, m.F, m.G).finished();
  const Eigen::Matrix3d b = (Eigen::Matrix3d() <<
      0.0, 0.5 * m.Ev, 0.5 * m.Gu,
      0.5 * m.Ev, m.E, m.F,
      0.5 * m.Gu, m.F, m.G).finished();
  const double det = m.det();
  return (a.determinant() - b.determinant()) / (det * det);
}

/// Partial derivatives of an embedding X(u, v) in R^3 through order three.
struct EmbeddingJet {
  Eigen::Vector3d X, Xu, Xv, Xuu, Xuv, Xvv, Xuuu, Xuuv, Xuvv, Xvvv;
};

inline MetricJet metric_from_embedding(const EmbeddingJet& e) {
  MetricJet m;
  m.E = e.Xu.dot(e.Xu);
  m.F = e.Xu.dot(e.Xv);
  m.G = e.Xv.dot(e.Xv);
  m.Eu = 2.0 * e.Xuu.dot(e.Xu);
  m.Ev = 2.0 * e.Xuv.dot(e.Xu);
  m.Gu = 2.0 * e.Xuv.dot(e.Xv);
  m.Gv = 2.0 * e.Xvv.dot(e.Xv);
  m.Fu = e.Xuu.dot(e.Xv) + e.Xu.dot(e.Xuv);
  m.Fv = e.Xuv.dot(e.Xv) + e.Xu.dot(e.Xvv);
  m.Euu = 2.0 * (e.Xuuu.dot(e.Xu) + e.Xuu.dot(e.Xuu));
  m.Euv = 2.0 * (e.Xuuv.dot(e.Xu) + e.Xuu.dot(e.Xuv));
  m.Evv = 2.0 * (e.Xuvv.dot(e.Xu) + e.Xuv.dot(e.Xuv));
  m.Guu = 2.0 * (e.Xuuv.dot(e.Xv) + e.Xuv.dot(e.Xuv));
  m.Guv = 2.0 * (e.Xuvv.dot(e.Xv) + e.Xuv.dot(e.Xvv));
  m.Gvv = 2.0 * (e.Xvvv.dot(e.Xv) + e.Xvv.dot(e.Xvv));
  m.Fuu = e.Xuuu.dot(e.Xv) + 2.0 * e.Xuu.dot(e.Xuv) + e.Xu.dot(e.Xuuv);
  m.Fuv = e.Xuuv.dot(e.Xv) + e.Xuu.dot(e.Xvv) + e.Xuv.dot(e.Xuv) + e.Xu.dot(e.Xuvv);
  m.Fvv = e.Xuvv.dot(e.Xv) + 2.0 * e.Xuv.dot(e.Xvv) + e.Xu.dot(e.Xvvv);
  return m;
}

/// Scales a metric jet by a conformal factor w = exp(2 phi) given with its
/// partial derivatives (w, wu, wv, wuu, wuv, wvv).
inline MetricJet conformal_scale(const MetricJet& m, const std::array<double, 6>& w) {
  const auto [w0, wu, wv, wuu, wuv, wvv] = w;
  auto scale = [&](double g, double gu, double gv, double guu, double guv, double gvv) {
    return std::array<double, 6>{
        w0 * g,
        wu * g + w0 * gu,
        wv * g + w0 * gv,
        wuu * g + 2.0 * wu * gu + w0 * guu,
        wuv * g + wu * gv + wv * gu + w0 * guv,
        wvv * g + 2.0 * wv * gv + w0 * gvv};
  };
  const auto e = scale(m.E, m.Eu, m.Ev, m.Euu, m.Euv, m.Evv);
  const auto f = scale(m.F, m.Fu, m.Fv, m.Fuu, m.Fuv, m.Fvv);
  const auto g = scale(m.G, m.Gu, m.Gv, m.Guu, m.Guv, m.Gvv);
  MetricJet r;
  r.E = e[0], r.Eu = e[1], r.Ev = e[2], r.Euu = e[3], r.Euv = e[4], r.Evv = e[5];
  r.F = f[0], r.Fu = f[1], r.Fv = f[2], r.Fuu = f[3], r.Fuv = f[4], r.Fvv = f[5];
  r.G = g[0], r.Gu = g[1], r.Gv = g[2], r.Guu = g[3], r.Guv = g[4], r.Gvv = g[5];
  return r;
}

/// Two overlapping polar charts on the ellipsoid x^2/A^2 + y^2/B^2 + z^2/C^2 = 1.
///
/// Chart 0 has its poles on the z-axis: X = (A sin u cos v, B sin u sin v, C cos u).
/// Chart 1 has its poles on the x-axis: X = (A cos u, B sin u cos v, C sin u sin v).
/// Both use u in [0, pi], v periodic.
struct EllipsoidAtlas {
  double A = 1, B = 1, C = 1;

  EmbeddingJet embedding(int chart, ChartPoint p) const {
    // Generic form (alpha s K, beta s S, gamma c) followed by an axis permutation.
    const double s = std::sin(p.u), c = std::cos(p.u), S = std::sin(p.v), K = std::cos(p.v);
    const double al = chart == 0 ? A : B;
    const double be = chart == 0 ? B : C;
    const double ga = chart == 0 ? C : A;
    auto put = [&](double a1, double a2, double a3) {
      // (a1, a2, a3) are the components along (alpha, beta, gamma) axes.
      return chart == 0 ? Eigen::Vector3d(a1, a2, a3) : Eigen::Vector3d(a3, a1, a2);
    };
    EmbeddingJet e;
    e.X = put(al * s * K, be * s * S, ga * c);
    e.Xu = put(al * c * K, be * c * S, -ga * s);
    e.Xv = put(-al * s * S, be * s * K, 0.0);
    e.Xuu = put(-al * s * K, -be * s * S, -ga * c);
    e.Xuv = put(-al * c * S, be * c * K, 0.0);
    e.Xvv = put(-al * s * K, -be * s * S, 0.0);
    e.Xuuu = put(-al * c * K, -be * c * S, ga * s);
    e.Xuuv = put(al * s * S, -be * s * K, 0.0);
    e.Xuvv = put(-al * c * K, -be * c * S, 0.0);
    e.Xvvv = put(al * s * S, -be * s * K, 0.0);
    return e;
  }

  Eigen::Vector3d position(int chart, ChartPoint p) const {
    const double s = std::sin(p.u), c = std::cos(p.u);
    if (chart == 0) return {A * s * std::cos(p.v), B * s * std::sin(p.v), C * c};
    return {A * c, B * s * std::cos(p.v), C * s * std::sin(p.v)};
  }

  ChartPoint locate(int chart, const Eigen::Vector3d& x) const {
    if (chart == 0) {
      const double zc = std::clamp(x.z() / C, -1.0, 1.0);
      return {std::acos(zc), std::atan2(x.y() / B, x.x() / A)};
    }
    const double xc = std::clamp(x.x() / A, -1.0, 1.0);
    return {std::acos(xc), std::atan2(x.z() / C, x.y() / B)};
  }

  /// Maps a point between the two charts.
  ChartPoint transfer(int from, ChartPoint p) const { return locate(1 - from, position(from, p)); }

  /// Chart in which p (given in chart 0) sits farthest from a pole.
  int preferred_chart(ChartPoint p0) const {
    const ChartPoint p1 = transfer(0, p0);
    return std::abs(std::sin(p0.u)) >= std::abs(std::sin(p1.u)) ? 0 : 1;
  }
};

}  // namespace gapkit
