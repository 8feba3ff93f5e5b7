#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "gapkit/domain.hpp"

using namespace gapkit;

namespace {

constexpr double kPi = std::numbers::pi;

Surface unit_sphere() { return Surface(RoundSphere{1.0}, 64); }
Surface ellipsoid(double eps) { return Surface(SurfaceOfRevolution{ProfileCurve::ellipsoid(eps)}, 128); }

std::size_t edge_count(const TriMesh& m) {
  std::set<std::pair<int, int>> e;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) e.insert(std::minmax(t[k], t[(k + 1) % 3]));
  return e.size();
}

}  // namespace

TEST(RadialProfile, SphereClosedForms) {
  const RadialProfile p = RadialProfile::sphere(2.0);
  for (double r : {0.0, 0.05, 0.7, 2.5}) {
    EXPECT_NEAR(p.f(r), 2.0 * std::sin(r / 2.0), 1e-15);
    EXPECT_NEAR(p.kappa(r), 0.25, 1e-15);
    EXPECT_NEAR(p.ddf(r), -0.25 * p.f(r), 1e-15);
  }
  // series and closed-form branches of beta agree at the switch
  const double s = 0.2 - 1e-9;
  EXPECT_NEAR(p.beta(s), p.beta(0.2 + 1e-9), 1e-8);
}

TEST(RadialProfile, MetricInNormalCoordinates) {
  // radial direction has unit length, angular direction length f(r)/r
  const RadialProfile p = RadialProfile::sphere(1.0);
  const Eigen::Vector2d x(0.6, 0.8);  // r = 1
  const Eigen::Matrix2d g = cap_metric_matrix(p, x);
  const Eigen::Vector2d er = x.normalized(), et(-er.y(), er.x());
  EXPECT_NEAR(er.dot(g * er), 1.0, 1e-14);
  EXPECT_NEAR(et.dot(g * et), std::pow(std::sin(1.0), 2), 1e-14);
  EXPECT_NEAR(er.dot(g * et), 0.0, 1e-14);
}

TEST(RadialProfile, RevolutionMatchesSurfaceCurvature) {
  const double eps = 0.8;
  const ProfileCurve pc = ProfileCurve::ellipsoid(eps);
  const RadialProfile rp = RadialProfile::revolution(pc);
  EXPECT_NEAR(rp.f(0.0), 0.0, 1e-12);
  EXPECT_NEAR(rp.df(0.0), 1.0, 1e-8);
  const SurfaceModel m = SurfaceOfRevolution{pc};
  for (double r : {0.1, 0.5, 1.0}) {
    EXPECT_NEAR(rp.kappa(r), gaussian_curvature(m, {rp.x_of_r(r), 0.0}), 1e-8);
    EXPECT_NEAR(rp.f(r) * rp.f(r), pc.squared(rp.x_of_r(r))[0], 1e-8);
  }
  // Jacobi equation f'' = -kappa f by differencing f'
  const double r = 0.7, h = 1e-4;
  EXPECT_NEAR((rp.df(r + h) - rp.df(r - h)) / (2 * h), -rp.kappa(r) * rp.f(r), 1e-6);
}

TEST(Cap, SphereCapGeometry) {
  for (double t : {0.5, 1.0, kPi / 3, kPi / 2}) {
    const GeodesicDomain d = make_polar_cap(unit_sphere(), t);
    EXPECT_NEAR(d.area, 2.0 * kPi * (1.0 - std::cos(t)), 1e-12);
    if (t < kPi / 2) EXPECT_NEAR(d.kg, 1.0 / std::tan(t), 1e-12);
    EXPECT_NEAR(d.kappa_inf, 1.0, 1e-15);
    EXPECT_NEAR(d.kappa_sup, 1.0, 1e-15);
    EXPECT_NEAR(d.myers_bound, kPi, 1e-15);
    EXPECT_LE(d.diameter.lower, 2.0 * t + 1e-9);
    EXPECT_GE(d.diameter.upper, 2.0 * t - 1e-9);
    EXPECT_NEAR(d.diameter.D, 2.0 * t, 2e-3 * t);
    EXPECT_LE(d.diameter.d, d.diameter.D + 1e-12);
  }
}

TEST(Cap, HemisphereIsLimitingConvex) {
  const GeodesicDomain d = make_polar_cap(unit_sphere(), kPi / 2);
  EXPECT_TRUE(d.limiting_convex);
  EXPECT_NEAR(d.kg, 0.0, 1e-12);
  EXPECT_LE(d.diameter.D, d.myers_bound + 1e-9);
}

TEST(Cap, NonConvexCapRejected) {
  try {
    make_polar_cap(unit_sphere(), 2.0);
    FAIL() << "expected rejection";
  } catch (const DomainRejected& e) {
    EXPECT_NEAR(e.kg, 1.0 / std::tan(2.0), 1e-12);
  }
  EXPECT_THROW(make_polar_cap(unit_sphere(), -0.1), std::invalid_argument);
  EXPECT_THROW(make_cap(Surface(TriaxialEllipsoid{1.0, 1.1, 1.2}, 64), 0.3), std::invalid_argument);
}

TEST(Cap, EllipsoidCap) {
  const GeodesicDomain d = make_cap(ellipsoid(0.8), 0.8);
  EXPECT_GT(d.kg, 0.0);
  EXPECT_FALSE(d.limiting_convex);
  EXPECT_GE(d.kappa_sup, d.kappa_inf);
  EXPECT_LE(d.diameter.lower, 1.6 + 1e-9);
  EXPECT_GE(d.diameter.upper, 1.6 - 1e-9);
  EXPECT_LT(d.diameter.D, d.myers_bound);
  const TriMesh m = triangulate(d, 0.03);
  EXPECT_NEAR(mesh_area(m), d.area, 5e-3 * d.area);
}

TEST(Cap, FlatDisk) {
  const GeodesicDomain d = make_flat_disk(1.0);
  EXPECT_NEAR(d.area, kPi, 1e-12);
  EXPECT_NEAR(d.kg, 1.0, 0.0);
  EXPECT_NEAR(d.diameter.D, 2.0, 1e-9);
  EXPECT_NEAR(d.diameter.d, 2.0, 1e-9);
  EXPECT_FALSE(d.surface.has_value());
  EXPECT_THROW(make_flat_disk(0.0), std::invalid_argument);
}

TEST(Mesh, Topology) {
  const GeodesicDomain d = make_polar_cap(unit_sphere(), 1.0);
  const TriMesh m = triangulate(d, 0.05);
  // a disk: V - E + F = 1
  EXPECT_EQ(static_cast<long>(m.vertex_count()) - static_cast<long>(edge_count(m)) +
                static_cast<long>(m.triangles.size()),
            1);
  // h is the nominal ring spacing; the longest (diagonal) edge is reported in m.h
  EXPECT_GE(m.h, 0.05);
  EXPECT_LE(m.h, 1.5 * 0.05);
  std::size_t nb = 0;
  for (std::size_t i = 0; i < m.vertex_count(); ++i)
    if (m.boundary[i]) {
      ++nb;
      EXPECT_NEAR(m.param[i].norm(), 1.0, 1e-12);
    } else {
      EXPECT_LT(m.param[i].norm(), 1.0 - 1e-9);
    }
  EXPECT_EQ(nb + m.interior_count(), m.vertex_count());
  for (const auto& t : m.triangles) {
    const Eigen::Vector2d a = m.param[t[1]] - m.param[t[0]], b = m.param[t[2]] - m.param[t[0]];
    EXPECT_GT(a.x() * b.y() - a.y() * b.x(), 0.0);  // counter-clockwise, non-degenerate
  }
  for (std::size_t i = 0; i < m.vertex_count(); ++i)
    EXPECT_NEAR(m.embedded[i].norm(), 1.0, 1e-12);
}

TEST(Mesh, AreaConvergesUnderRefinement) {
  const GeodesicDomain d = make_polar_cap(unit_sphere(), kPi / 3);
  double prev = INFINITY;
  for (double h : {0.2, 0.1, 0.05}) {
    const double err = std::abs(mesh_area(triangulate(d, h)) - d.area);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-3 * d.area);
}

TEST(Mesh, RectangleAndBadSpacing) {
  const TriMesh r = rectangle_mesh(2.0, 1.0, 0.1);
  EXPECT_NEAR(mesh_area(r), 2.0, 1e-12);
  EXPECT_THROW(rectangle_mesh(1.0, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(triangulate(make_polar_cap(unit_sphere(), 1.0), 10.0), std::invalid_argument);
}

TEST(Diameter, SourceSubsetGivesSameBracket) {
  const GeodesicDomain d = make_polar_cap(unit_sphere(), 1.2);
  const TriMesh m = triangulate(d, 0.05);
  const DiameterBracket all = geodesic_diameter(d, m), few = geodesic_diameter(d, m, 8);
  EXPECT_EQ(few.sources, 8);
  EXPECT_NEAR(all.D, few.D, 1e-3);
  EXPECT_LE(all.lower, all.D);
  EXPECT_GE(all.upper, all.D);
}
