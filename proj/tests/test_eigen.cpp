#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gapkit/fem.hpp"
#include "gapkit/radial.hpp"
#include "gapkit/recovery.hpp"

using namespace gapkit;

namespace {

constexpr double kPi = std::numbers::pi;

Surface unit_sphere() { return Surface(RoundSphere{1.0}, 64); }

SpectralSolution solve(const GeodesicDomain& d, double h, int k = 3) {
  return solve_dirichlet(assemble(triangulate(d, h)), k);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Element, ReferenceTriangle) {
  const Eigen::Vector2d a(0, 0), b(1, 0), c(0, 1);
  Eigen::Matrix3d want;
  want << 1, -.5, -.5, -.5, .5, 0, -.5, 0, .5;
  EXPECT_LT((element_stiffness(a, b, c, Eigen::Matrix2d::Identity()) - want).norm(), 1e-15);
  const Eigen::Matrix3d m = element_mass(a, b, c, Eigen::Matrix2d::Identity());
  EXPECT_NEAR(m.sum(), 0.5, 1e-15);
  EXPECT_NEAR(m(0, 0), 2.0 * m(0, 1), 1e-15);
}

TEST(Element, ScalingAndConformalInvariance) {
  const Eigen::Vector2d a(0.1, -0.2), b(0.9, 0.15), c(0.3, 0.7);
  Eigen::Matrix2d G;
  G << 1.3, 0.2, 0.2, 0.8;
  const Eigen::Matrix3d K = element_stiffness(a, b, c, G), M = element_mass(a, b, c, G);
  EXPECT_LT(K.rowwise().sum().norm(), 1e-14);  // constants are in the kernel
  EXPECT_LT((K - K.transpose()).norm(), 1e-15);
  for (double rho : {0.5, 3.0}) {
    EXPECT_LT((element_stiffness(rho * a, rho * b, rho * c, G) - K).norm(), 1e-12);
    EXPECT_LT((element_mass(rho * a, rho * b, rho * c, G) - rho * rho * M).norm(), 1e-14);
    // conformal change of the metric in two dimensions
    EXPECT_LT((element_stiffness(a, b, c, rho * G) - K).norm(), 1e-12);
    EXPECT_LT((element_mass(a, b, c, rho * G) - rho * M).norm(), 1e-14);
  }
}

TEST(Assembly, MassTotalIsArea) {
  const GeodesicDomain d = make_polar_cap(unit_sphere(), 1.0);
  const TriMesh mesh = triangulate(d, 0.05);
  const Operators ops = assemble(mesh);
  EXPECT_NEAR(ops.mass_total, mesh_area(mesh), 1e-12 * mesh_area(mesh));
  EXPECT_NEAR(ops.mass_total, d.area, 2e-3 * d.area);
  EXPECT_EQ(static_cast<std::size_t>(ops.K.rows()), mesh.interior_count());
  EXPECT_LT((Eigen::MatrixXd(ops.K) - Eigen::MatrixXd(ops.K).transpose()).norm(), 1e-12);
  for (std::size_t i = 0; i < ops.vertex.size(); ++i) EXPECT_EQ(ops.dof[ops.vertex[i]], static_cast<int>(i));
}

TEST(Oracle, ClosedForms) {
  // hemisphere: degree-1 and degree-2 harmonics vanishing on the equator
  const RadialOracleResult h = radial_oracle(RadialProfile::sphere(1.0), kPi / 2);
  EXPECT_NEAR(h.lambda1, 2.0, 1e-9);
  EXPECT_NEAR(h.lambda2, 6.0, 1e-9);
  const RadialOracleResult disk = radial_oracle(RadialProfile::flat(), 1.0);
  EXPECT_NEAR(disk.lambda1, std::pow(bessel_zero(0, 1), 2), 1e-9);
  EXPECT_NEAR(disk.lambda2, std::pow(bessel_zero(1, 1), 2), 1e-9);
  EXPECT_NEAR(bessel_zero(0, 1), 2.404825557695773, 1e-12);
  EXPECT_NEAR(bessel_zero(1, 1), 3.831705970207512, 1e-12);
  // radius scaling
  const RadialOracleResult half = radial_oracle(RadialProfile::flat(), 0.5);
  EXPECT_NEAR(half.lambda1, 4.0 * disk.lambda1, 1e-8);
  EXPECT_EQ(h.mode0.interior_zeros, 0);
  EXPECT_THROW(radial_oracle(RadialProfile::sphere(1.0), 2.0), std::invalid_argument);
}

TEST(Fem, DiskAgainstBessel) {
  const SpectralSolution s = solve(make_flat_disk(1.0), 0.03);
  EXPECT_LT(rel(s.lambda[0], std::pow(bessel_zero(0, 1), 2)), 2e-3);
  EXPECT_LT(rel(s.lambda[1], std::pow(bessel_zero(1, 1), 2)), 3e-3);
  EXPECT_TRUE(s.degenerate_23);
  EXPECT_FALSE(s.multiplicity_risk);
  for (double r : s.residuals) EXPECT_LT(r, 1e-8);
}

TEST(Fem, HemisphereAndModes) {
  const GeodesicDomain d = make_polar_cap(unit_sphere(), kPi / 2);
  const Operators ops = assemble(triangulate(d, 0.05));
  const SpectralSolution s = solve_dirichlet(ops, 3);
  EXPECT_LT(rel(s.lambda[0], 2.0), 2e-3);
  EXPECT_LT(rel(s.lambda[1], 6.0), 3e-3);
  EXPECT_LE(s.lambda[0], s.lambda[1]);
  EXPECT_LE(s.lambda[1], s.lambda[2]);
  // M-orthonormal on the interior dofs
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Eigen::VectorXd ua(ops.vertex.size()), ub(ops.vertex.size());
      for (std::size_t i = 0; i < ops.vertex.size(); ++i) ua(i) = s.modes[a](ops.vertex[i]), ub(i) = s.modes[b](ops.vertex[i]);
      EXPECT_NEAR(ua.dot(ops.M * ub), a == b ? 1.0 : 0.0, 1e-8);
    }
  const auto [lo, hi] = interior_range(s);
  EXPECT_GT(lo, 0.0);
  EXPECT_GT(hi, lo);
}

TEST(Fem, SecondOrderConvergence) {
  const GeodesicDomain d = make_polar_cap(unit_sphere(), kPi / 3);
  const RadialOracleResult o = radial_oracle(d.profile, d.r0);
  const SpectralSolution a = solve(d, 0.08), b = solve(d, 0.04);
  const double order1 = std::log2((a.lambda[0] - o.lambda1) / (b.lambda[0] - o.lambda1));
  const double order2 = std::log2((a.lambda[1] - o.lambda2) / (b.lambda[1] - o.lambda2));
  EXPECT_NEAR(order1, 2.0, 0.25);
  EXPECT_NEAR(order2, 2.0, 0.25);
  EXPECT_GT(b.lambda[0], o.lambda1);  // conforming P1 approximates from above
}

TEST(Fem, EllipsoidCapAgainstOracle) {
  const GeodesicDomain d = make_cap(Surface(SurfaceOfRevolution{ProfileCurve::ellipsoid(0.8)}, 128), 0.8);
  const RadialOracleResult o = radial_oracle(d.profile, d.r0);
  const SpectralSolution s = solve(d, 0.03);
  EXPECT_LT(rel(s.lambda[0], o.lambda1), 3e-3);
  EXPECT_LT(rel(s.lambda[1], o.lambda2), 5e-3);
}

TEST(Fem, DeterministicAndGuarded) {
  const GeodesicDomain d = make_polar_cap(unit_sphere(), 1.0);
  const SpectralSolution a = solve(d, 0.06), b = solve(d, 0.06);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.modes[0], b.modes[0]);
  const Operators ops = assemble(triangulate(d, 0.06));
  EXPECT_THROW(solve_dirichlet(ops, 1), std::invalid_argument);
  EXPECT_THROW(solve_dirichlet(assemble(rectangle_mesh(1.0, 1.0, 0.24)), 3), std::invalid_argument);  // 16 dofs
}

TEST(Recovery, QuarticFitIsExact) {
  std::vector<Eigen::Vector2d> x;
  std::vector<double> y;
  const Eigen::Vector2d c(0.3, -0.1);
  auto f = [](const Eigen::Vector2d& p) {
    return 1.0 + 2 * p.x() - p.y() + 0.5 * p.x() * p.x() + 3 * p.x() * p.y() - p.y() * p.y() + std::pow(p.x(), 4);
  };
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) {
      const Eigen::Vector2d p = c + 0.02 * Eigen::Vector2d(i, j);
      x.push_back(p), y.push_back(f(p));
    }
  const LocalJet j = fit_local_poly(c, x, y, 0.1);
  EXPECT_NEAR(j.value, f(c), 1e-10);
  EXPECT_NEAR(j.grad.x(), 2 + c.x() + 3 * c.y() + 4 * std::pow(c.x(), 3), 1e-8);
  EXPECT_NEAR(j.grad.y(), -1 + 3 * c.x() - 2 * c.y(), 1e-8);
  EXPECT_NEAR(j.hess(0, 0), 1 + 12 * c.x() * c.x(), 1e-6);
  EXPECT_NEAR(j.hess(0, 1), 3, 1e-6);
  EXPECT_NEAR(j.hess(1, 1), -2, 1e-6);
}

TEST(Recovery, OneDimensionalSineSanity) {
  std::vector<Eigen::Vector2d> x;
  std::vector<double> y;
  for (int i = -5; i <= 5; ++i)
    for (int j = -2; j <= 2; ++j) {
      const Eigen::Vector2d p(1.0 + 0.03 * i, 0.03 * j);
      x.push_back(p), y.push_back(std::sin(p.x()));
    }
  const LocalJet j = fit_local_poly({1.0, 0.0}, x, y, 0.15);
  EXPECT_NEAR(j.grad.x(), std::cos(1.0), 1e-6);
  EXPECT_NEAR(j.hess(0, 0), -std::sin(1.0), 1e-3);
  EXPECT_NEAR(j.hess(1, 1), 0.0, 1e-8);
  EXPECT_THROW(fit_local_poly({0, 0}, {x.begin(), x.begin() + 10}, {y.begin(), y.begin() + 10}, 1.0),
               std::runtime_error);
}

TEST(Recovery, HemisphereGroundState) {
  // u1 = cos r, so v = log cos r, Hess v = diag(-sec^2 r, -1) in the orthonormal polar frame
  const GeodesicDomain d = make_polar_cap(unit_sphere(), kPi / 2);
  const SpectralSolution s = solve(d, 0.04);
  const RecoveredField f = recover_derivatives(s, d);
  ASSERT_FALSE(f.points.empty());
  EXPECT_LT(f.identity_sup, 0.05);
  double worst = 0.0;
  for (const auto& p : f.points) {
    const double r = p.p.norm();
    EXPECT_NEAR(p.kappa, 1.0, 1e-12);
    if (r < 1e-9) continue;
    const Eigen::Vector2d er = p.p / r;
    const double grr = er.dot(p.hess_v * er);  // radial coordinate direction has unit length
    worst = std::max(worst, std::abs(grr + 1.0 / std::pow(std::cos(r), 2)) * std::pow(std::cos(r), 2));
  }
  EXPECT_LT(worst, 0.05);
  EXPECT_LT(f.w_residual_sup, 0.5);
  EXPECT_THROW(recover_derivatives(s, d, 2.0), std::invalid_argument);
}
