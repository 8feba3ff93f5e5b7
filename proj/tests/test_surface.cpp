#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gapkit/surface.hpp"

using namespace gapkit;

namespace {

SurfaceModel ellipsoid(double eps) { return SurfaceOfRevolution{ProfileCurve::ellipsoid(eps)}; }
SurfaceModel ellipsoid_chart(double eps) { return ParametricSurface::revolution_chart(ProfileCurve::ellipsoid(eps)); }
double pole_value(double eps) { return -1.0 / (eps * eps) - 4.0 / std::pow(eps, 4); }

}  // namespace

TEST(Curvature, RoundSphereIsOne) {
  const SurfaceModel s = RoundSphere{1.0};
  for (ChartPoint p : {ChartPoint{0.0, 0.0}, ChartPoint{0.7, 1.1}, ChartPoint{std::numbers::pi / 2, -2.0}}) {
    EXPECT_NEAR(gaussian_curvature(s, p), 1.0, 1e-14);
    EXPECT_EQ(delta_log_kappa(s, p), 0.0);
  }
  EXPECT_NEAR(gaussian_curvature(RoundSphere{2.0}, {0.3, 0.0}), 0.25, 1e-14);
}

TEST(Curvature, EllipsoidPoleValues) {
  for (double eps : {0.7, 0.8064, 0.9, 1.0}) {
    const double k = gaussian_curvature(ellipsoid(eps), {0.0, 0.0});
    EXPECT_NEAR(k, 1.0 / (eps * eps), 1e-12 / (eps * eps));
    const double exact = pole_value(eps);
    const double analytic = delta_log_kappa(ellipsoid(eps), {0.0, 0.0}) - 5.0 * k;
    EXPECT_NEAR(analytic, exact, 1e-8 * std::abs(exact)) << eps;
    const double fd = delta_log_kappa(ellipsoid_chart(eps), {0.0, 0.0}) -
                      5.0 * gaussian_curvature(ellipsoid_chart(eps), {0.0, 0.0});
    EXPECT_NEAR(fd, exact, 1e-4 * std::abs(exact)) << eps;
  }
  EXPECT_NEAR(pole_value(0.9), -7.3311, 1e-4);
  EXPECT_DOUBLE_EQ(pole_value(1.0), -5.0);
}

TEST(Curvature, FlatProfileRawFormula) {
  Jet<4> f;  // f = r at r = 0.5
  f.d = {0.5, 1.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(revolution_kappa(f), 0.0);
}

TEST(Curvature, TriaxialClosedFormMatchesBrioschi) {
  const TriaxialEllipsoid t{1.0, 1.1, 1.3};
  const EllipsoidAtlas at = t.atlas();
  for (int c = 0; c < 2; ++c)
    for (ChartPoint p : {ChartPoint{0.7, 0.4}, ChartPoint{1.9, -2.2}}) {
      const double br = brioschi_curvature(metric_from_embedding(at.embedding(c, p)));
      EXPECT_NEAR(br, t.kappa_at(at.position(c, p)), 1e-10);
    }
}

TEST(Curvature, OutsideChartThrows) {
  EXPECT_THROW(gaussian_curvature(ellipsoid(0.9), {1.0, 0.0}), std::out_of_range);
  EXPECT_THROW(delta_log_kappa(RoundSphere{1.0}, {4.0, 0.0}), std::out_of_range);
}

TEST(Curvature, NonPositiveModelRejected) {
  // exp(2 c T2(z)) times the round metric has kappa < 0 on the equator once c > 1/4
  EXPECT_THROW(Surface(ParametricSurface::conformal_sphere({0.0, 0.0, 0.5}), 64), std::invalid_argument);
}

TEST(LaplaceBeltrami, SphericalHarmonics) {
  const SurfaceModel s = RoundSphere{1.0};
  const ScalarField one{[](ChartPoint) { return 1.0; }, {}};
  const ScalarField y1{[](ChartPoint p) { return std::cos(p.u); }, {}};
  const ScalarField y2{[](ChartPoint p) { return 0.5 * (3.0 * std::pow(std::cos(p.u), 2) - 1.0); }, {}};
  const ScalarField y1_exact{[](ChartPoint p) { return std::cos(p.u); },
                             [](ChartPoint p) {
                               return std::array<double, 6>{std::cos(p.u), -std::sin(p.u), 0, -std::cos(p.u), 0, 0};
                             }};
  for (ChartPoint p : {ChartPoint{0.4, 0.3}, ChartPoint{1.2, -1.0}, ChartPoint{2.5, 2.0}}) {
    EXPECT_NEAR(laplace_beltrami(s, one, p), 0.0, 1e-9);
    EXPECT_NEAR(laplace_beltrami(s, y1, p), -2.0 * std::cos(p.u), 1e-5);
    EXPECT_NEAR(laplace_beltrami(s, y2, p), -6.0 * y2.value(p), 1e-5);
    EXPECT_NEAR(laplace_beltrami(s, y1_exact, p), -2.0 * std::cos(p.u), 1e-5);
  }
  // away from the poles the primary chart is used and the jet path is exact
  const ChartPoint eq{1.4, 0.2};
  EXPECT_NEAR(laplace_beltrami(s, y1_exact, eq), -2.0 * std::cos(eq.u), 1e-12);
}

TEST(LaplaceBeltrami, SecondOrderAccurate) {
  const SurfaceModel s = RoundSphere{1.0};
  const ScalarField y2{[](ChartPoint p) { return 0.5 * (3.0 * std::pow(std::cos(p.u), 2) - 1.0); }, {}};
  const ChartPoint p{1.0, 0.5};
  const double e1 = std::abs(laplace_beltrami(s, y2, p, {0.02}) + 6.0 * y2.value(p));
  const double e2 = std::abs(laplace_beltrami(s, y2, p, {0.01}) + 6.0 * y2.value(p));
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}

TEST(Extrema, SphereAndEllipsoid) {
  const auto e = curvature_extrema(RoundSphere{1.0}, 64);
  EXPECT_NEAR(e.kappa_min, 1.0, 1e-14);
  EXPECT_NEAR(e.kappa_max, 1.0, 1e-14);
  for (double eps : {0.7, 0.9}) {
    const auto x = curvature_extrema(ellipsoid(eps), 512);
    EXPECT_NEAR(x.kappa_max, 1.0 / (eps * eps), 1e-10);
    EXPECT_NEAR(x.argmax.u, 0.0, 1e-6);
    EXPECT_NEAR(x.kappa_min, eps * eps, 1e-10);
    EXPECT_NEAR(std::abs(x.argmin.u), eps, 1e-6);
  }
}

TEST(Extrema, MonotoneUnderRefinement) {
  const SurfaceModel t = TriaxialEllipsoid{1.0, 1.07, 1.21};
  double lo = INFINITY, hi = -INFINITY;
  for (int res : {64, 128, 256}) {
    const auto e = curvature_extrema(t, res);
    EXPECT_LE(e.kappa_min, lo + 1e-15);
    EXPECT_GE(e.kappa_max, hi - 1e-15);
    lo = e.kappa_min, hi = e.kappa_max;
  }
  const auto& tri = std::get<TriaxialEllipsoid>(t);
  EXPECT_NEAR(lo, tri.a / (tri.b * tri.c), 1e-12);
  EXPECT_NEAR(hi, tri.c / (tri.a * tri.b), 1e-12);
}

TEST(GaussBonnet, ClosedModels) {
  const double four_pi = 4.0 * std::numbers::pi;
  for (const SurfaceModel& m :
       {SurfaceModel(RoundSphere{1.3}), ellipsoid(0.7), ellipsoid_chart(0.8), SurfaceModel(TriaxialEllipsoid{1.0, 1.1, 1.3}),
        SurfaceModel(ParametricSurface::conformal_sphere({0.0, 0.05, 0.1}))})
    EXPECT_NEAR(gauss_bonnet_integral(m, 512), four_pi, 1e-6 * four_pi) << model_kind(m);
}

TEST(Consistency, ClosedFormMatchesChartDifferences) {
  // the chart path is second-order accurate in its step
  for (double x : {-0.5, 0.1, 0.6}) {
    const double exact = delta_log_kappa(ellipsoid(0.8), {x, 0.0});
    const double e1 = std::abs(delta_log_kappa(ellipsoid_chart(0.8), {x, 0.0}, {2e-3}) - exact);
    const double e2 = std::abs(delta_log_kappa(ellipsoid_chart(0.8), {x, 0.0}, {1e-3}) - exact);
    EXPECT_LT(e1, 1e-4);
    EXPECT_GT(e1 / e2, 3.0);
  }
}

TEST(Consistency, ScalingCovariance) {
  const ProfileCurve p = ProfileCurve::ellipsoid(0.8);
  for (double rho : {0.5, 2.0, 3.7}) {
    const SurfaceModel s = SurfaceOfRevolution{p.scaled(rho)};
    const SurfaceModel s1 = SurfaceOfRevolution{p};
    for (double x : {-0.3, 0.0, 0.5}) {
      const double k = gaussian_curvature(s1, {x, 0.0}), d = delta_log_kappa(s1, {x, 0.0});
      EXPECT_NEAR(gaussian_curvature(s, {rho * x, 0.0}), k / (rho * rho), 1e-12 * std::abs(k));
      EXPECT_NEAR(delta_log_kappa(s, {rho * x, 0.0}), d / (rho * rho), 1e-11 * std::abs(d));
    }
  }
}

TEST(Consistency, RotationalSymmetry) {
  const SurfaceModel s = ellipsoid(0.85);
  for (double x : {-0.6, 0.0, 0.4}) {
    const double k0 = gaussian_curvature(s, {x, 0.0}), d0 = delta_log_kappa(s, {x, 0.0});
    for (double v : {0.3, 1.7, -2.9}) {
      EXPECT_NEAR(gaussian_curvature(s, {x, v}), k0, 1e-12);
      EXPECT_NEAR(delta_log_kappa(s, {x, v}), d0, 1e-12);
    }
  }
}

TEST(Sample, CarriesModelExtrema) {
  const Surface s(ellipsoid(0.9));
  const CurvatureSample c = curvature_sample(s, {0.2, 0.0});
  EXPECT_NEAR(c.kappa_min, 0.81, 1e-10);
  EXPECT_NEAR(c.kappa_max, 1.0 / 0.81, 1e-10);
  EXPECT_GE(c.kappa, c.kappa_min);
  EXPECT_LE(c.kappa, c.kappa_max);
  EXPECT_GT(c.metric.determinant(), 0.0);
  EXPECT_NEAR((c.metric * c.inverse - Eigen::Matrix2d::Identity()).norm(), 0.0, 1e-12);
}
