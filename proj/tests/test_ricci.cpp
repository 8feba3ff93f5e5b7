#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gapkit/ricci.hpp"

using namespace gapkit;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlpha = 6.0 / 7.0;

}  // namespace

TEST(Bounds, SolveTheCurvatureOde) {
  // both bounds solve k' = k^2 - k and start at 1/alpha and alpha
  const double a = 0.8, h = 1e-5;
  for (double t : {0.05, 0.3, 1.0}) {
    const OdeBounds b = ode_bounds(a, t), p = ode_bounds(a, t + h), m = ode_bounds(a, t - h);
    EXPECT_NEAR((p.kappa_max - m.kappa_max) / (2 * h), b.kappa_max * b.kappa_max - b.kappa_max, 1e-6);
    EXPECT_NEAR((p.kappa_min - m.kappa_min) / (2 * h), b.kappa_min * b.kappa_min - b.kappa_min, 1e-6);
    EXPECT_NEAR(b.pinching, b.kappa_max / b.kappa_min - b.kappa_max, 1e-12);
    EXPECT_NEAR(b.margin, 1.0 + b.harnack - 6.0 * b.pinching + 5.0 * b.kappa_min, 0.0);
  }
  EXPECT_NEAR(ode_bounds(a, 1e-12).kappa_max, 1.0 / a, 1e-9);
  EXPECT_NEAR(ode_bounds(a, 1e-12).kappa_min, a, 1e-9);
  EXPECT_THROW(ode_bounds(a, std::log(1.0 / (1.0 - a))), std::domain_error);
  EXPECT_THROW(ode_bounds(a, 0.0), std::invalid_argument);
  EXPECT_THROW(ode_bounds(1.0, 0.1), std::invalid_argument);
}

TEST(Bounds, HarnackFloor) {
  EXPECT_NEAR(harnack_floor(1e-6) * 1e-6, -1.0, 1e-6);
  EXPECT_NEAR(harnack_floor(30.0), -1.0, 1e-12);
  EXPECT_NEAR(harnack_floor(1.0), -std::exp(1.0) / (std::exp(1.0) - 1.0), 1e-15);
}

TEST(Bounds, OnsetTimes) {
  const OnsetTimes o = onset_times(kAlpha);
  EXPECT_NEAR(o.t_on, 0.37771, 5e-5);
  EXPECT_NEAR(o.t_off, 0.67485, 5e-5);
  EXPECT_NEAR(ode_bounds(kAlpha, o.t_on).margin, 0.0, 1e-9);
  EXPECT_GT(ode_bounds(kAlpha, 0.5 * (o.t_on + o.t_off)).margin, 0.0);
  EXPECT_LT(ode_bounds(kAlpha, 0.5 * o.t_on).margin, 0.0);
  EXPECT_THROW(onset_times(0.5), std::runtime_error);  // too weakly pinched, never positive
}

TEST(Collocation, LaplacianExactOnCosines) {
  const ConformalFlow f(32);
  const Eigen::VectorXd z = f.theta().array().cos().matrix();
  const Eigen::VectorXd p2 = (0.5 * (3.0 * z.array().square() - 1.0)).matrix();
  EXPECT_LT((f.round_laplacian(z) + 2.0 * z).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT((f.round_laplacian(p2) + 6.0 * p2).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(f.round_laplacian(Eigen::VectorXd::Ones(32)).cwiseAbs().maxCoeff(), 1e-10);  // entries grow like N^2
  EXPECT_NEAR(f.area(Eigen::VectorXd::Zero(32)), 4.0 * kPi, 1e-13);
  EXPECT_THROW(ConformalFlow(4), std::invalid_argument);
}

TEST(Flow, RoundSphereIsFixed) {
  const ConformalFlow f(32);
  FlowState s = round_initial_state(f);
  for (int i = 0; i < 20; ++i) s = flow_step(f, s, 0.01);
  EXPECT_LT(s.phi.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(s.kappa_min, 1.0, 1e-12);
  EXPECT_NEAR(s.kappa_max, 1.0, 1e-12);
  EXPECT_NEAR(s.harnack_min, 0.0, 1e-11);
}

TEST(Flow, PinchedInitialState) {
  const ConformalFlow f(64);
  const FlowState s = pinched_initial_state(f, kAlpha);
  EXPECT_NEAR(s.kappa_min / s.kappa_max, kAlpha, 1e-10);
  EXPECT_NEAR(s.area, 4.0 * kPi, 1e-11);
  EXPECT_THROW(pinched_initial_state(f, 0.0), std::invalid_argument);
}

TEST(Flow, MaximumPrincipleAreaAndEvolution) {
  const ConformalFlow f(64);
  const DominanceTrace tr = dominance_trace(f, pinched_initial_state(f, kAlpha), kAlpha, 0.6, 1e-3);
  ASSERT_EQ(tr.rows.size(), 601u);
  const double a0 = tr.rows.front().area;
  for (const auto& r : tr.rows) {
    EXPECT_NEAR(r.area, a0, 1e-9 * a0);
    if (r.t == 0.0) continue;
    EXPECT_LE(r.kappa_max, r.kappa_max_bound + 1e-9);
    EXPECT_GE(r.kappa_min, r.kappa_min_bound - 1e-9);
    EXPECT_GE(r.harnack_floor_gap, -1e-6);
    EXPECT_LT(r.evolution_residual, 1e-4);
  }
  ASSERT_TRUE(tr.first_positive_closed.has_value());
  EXPECT_NEAR(*tr.first_positive_closed, onset_times(kAlpha).t_on, 1.5e-3);
  ASSERT_TRUE(tr.first_positive_measured.has_value());
  EXPECT_LE(*tr.first_positive_measured, *tr.first_positive_closed);
  EXPECT_FALSE(tr.truncated_closed_form);
}

TEST(Flow, CurvatureConvergesToRound) {
  const ConformalFlow f(32);
  FlowState s = pinched_initial_state(f, 0.7);
  const double spread0 = s.kappa_max - s.kappa_min;
  for (int i = 0; i < 300; ++i) s = flow_step(f, s, 0.01);
  EXPECT_LT(s.kappa_max - s.kappa_min, 0.2 * spread0);
}

TEST(Flow, EvolutionUsesHalfLaplacian) {
  const ConformalFlow f(32);
  const FlowState s = flow_step(f, pinched_initial_state(f, 0.8), 1e-4);
  EXPECT_LT(s.evolution_residual, 1e-6);
  EXPECT_GT(s.evolution_residual_full, 100.0 * s.evolution_residual);
}

TEST(Flow, CflSubsteppingAndStrictMode) {
  const ConformalFlow f(128);
  const FlowState s0 = pinched_initial_state(f, kAlpha);
  const double lim = f.cfl_limit(s0);
  EXPECT_THROW(flow_step(f, s0, 2.0 * lim, true), std::domain_error);
  const FlowState a = flow_step(f, s0, 10.0 * lim);
  EXPECT_GE(a.substeps, 10);
  EXPECT_EQ(flow_step(f, s0, 0.5 * lim, true).substeps, 1);
  EXPECT_THROW(flow_step(f, s0, 0.0), std::invalid_argument);
}
