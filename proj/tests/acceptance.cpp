// Acceptance run: one PASS/FAIL line per criterion, diagnostics indented below.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "gapkit/gapkit.hpp"

using namespace gapkit;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  std::vector<std::string> notes;
  bool ok = true;

  void check(bool cond, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    notes.push_back(std::string(cond ? "ok   " : "FAIL ") + buf);
    ok = ok && cond;
  }
  void info(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    notes.push_back(std::string("     ") + buf);
  }
};

int failures = 0;

void run_criterion(int id, const char* title, double budget_s, const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.check(false, "exception: %s", e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.check(secs < budget_s, "runtime %.2f s (budget %.0f s)", secs, budget_s);
  std::printf("%s %2d %s\n", c.ok ? "PASS" : "FAIL", id, title);
  for (const auto& n : c.notes) std::printf("        %s\n", n.c_str());
  std::fflush(stdout);
  failures += !c.ok;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---- 1 ----------------------------------------------------------------------------

void pole_closed_form(Criterion& c) {
  for (double eps : {0.7, 0.8064, 0.9, 1.0}) {
    const double exact = ellipsoid_pole_value(eps);
    const SurfaceModel rev = SurfaceOfRevolution{ProfileCurve::ellipsoid(eps)};
    const SurfaceModel chart = ParametricSurface::revolution_chart(ProfileCurve::ellipsoid(eps));
    const double a = delta_log_kappa(rev, {0, 0}) - 5.0 * gaussian_curvature(rev, {0, 0});
    const double f = delta_log_kappa(chart, {0, 0}) - 5.0 * gaussian_curvature(chart, {0, 0});
    c.check(rel(a, exact) <= 1e-8, "eps %.4f analytic %.12f vs %.12f (rel %.1e)", eps, a, exact, rel(a, exact));
    c.check(rel(f, exact) <= 1e-4, "eps %.4f finite-difference %.9f (rel %.1e)", eps, f, rel(f, exact));
  }
  c.check(ellipsoid_pole_value(1.0) == -5.0, "value at eps = 1 is -5");
}

// ---- 2 ----------------------------------------------------------------------------

void threshold(Criterion& c) {
  const ThresholdResult r = threshold_solve([](double e) { return ellipsoid_pole_value(e) + 11.0; }, 0.6, 1.0);
  const double want = std::sqrt((1.0 + std::sqrt(177.0)) / 22.0);
  c.check(std::abs(r.parameter - want) <= 1e-5, "root %.8f vs %.8f", r.parameter, want);
  c.check(r.monotone_near_root, "margin monotone around the root");
}

// ---- 3 ----------------------------------------------------------------------------

// Minimum of the triaxial quantity over the grid, worst case over b in [a, c].
double worst_over_b(double ratio, int res, double* worst_b = nullptr) {
  double m = INFINITY;
  for (int i = 0; i <= 4; ++i) {
    const double b = 1.0 + (ratio - 1.0) * i / 4.0;
    const double v = check_triaxial_quantity(Surface(TriaxialEllipsoid{1.0, b, ratio}, res), res).min_margin;
    if (v < m) m = v, worst_b ? *worst_b = b : 0.0;
  }
  return m;
}

void triaxial(Criterion& c) {
  double b132 = 0, b13 = 0;
  worst_over_b(1.132, 96, &b132);
  worst_over_b(1.3, 96, &b13);
  const Surface s132(TriaxialEllipsoid{1.0, b132, 1.132}, 512), s13(TriaxialEllipsoid{1.0, b13, 1.3}, 512);
  const double m132 = check_triaxial_quantity(s132, 512).min_margin;
  const double m13 = check_triaxial_quantity(s13, 512).min_margin;
  c.check(m132 >= -1e-2 * s132.kappa_min(), "c/a 1.132: grid minimum %.5f at worst b = %.4f (512^2)", m132, b132);
  c.check(m13 < 0.0, "c/a 1.3: grid minimum %.5f at worst b = %.4f (512^2)", m13, b13);
  // sign change of the worst-case minimum in c/a
  const ThresholdResult t = threshold_solve([](double r) { return worst_over_b(r, 128); }, 1.01, 1.6, 59, 1e-4);
  c.check(t.parameter >= 1.10 && t.parameter <= 1.16, "cutoff c/a = %.4f, expected inside [1.10, 1.16]", t.parameter);
  c.info("square root of the cutoff (semi-axis ratio): %.4f", std::sqrt(t.parameter));
}

// ---- 4 ----------------------------------------------------------------------------

void eigen_oracles(Criterion& c) {
  const Surface sphere(RoundSphere{1.0}, 64);
  const double j01 = std::pow(bessel_zero(0, 1), 2);
  const SpectralSolution disk = solve_dirichlet(assemble(triangulate(make_flat_disk(1.0), 0.02)), 3);
  c.check(rel(disk.lambda[0], j01) <= 5e-3, "disk lambda1 %.6f vs %.6f (rel %.2e)", disk.lambda[0], j01,
          rel(disk.lambda[0], j01));
  const GeodesicDomain hemi = make_polar_cap(sphere, kPi / 2);
  const SpectralSolution hs = solve_dirichlet(assemble(triangulate(hemi, 0.02)), 3);
  c.check(rel(hs.lambda[0], 2.0) <= 1e-2, "hemisphere lambda1 %.6f (rel %.2e)", hs.lambda[0], rel(hs.lambda[0], 2.0));
  c.check(rel(hs.lambda[1], 6.0) <= 1.5e-2, "hemisphere lambda2 %.6f (rel %.2e)", hs.lambda[1], rel(hs.lambda[1], 6.0));
  for (double t : {kPi / 3, kPi / 2}) {
    const GeodesicDomain d = make_polar_cap(sphere, t);
    const RadialOracleResult o = radial_oracle(d.profile, d.r0);
    std::vector<double> e1, e2;
    for (double h : {0.08, 0.04, 0.02}) {
      const SpectralSolution s = solve_dirichlet(assemble(triangulate(d, h)), 3);
      e1.push_back(s.lambda[0] - o.lambda1), e2.push_back(s.lambda[1] - o.lambda2);
    }
    for (int k = 0; k < 2; ++k) {
      const double p1 = std::log2(e1[k] / e1[k + 1]), p2 = std::log2(e2[k] / e2[k + 1]);
      c.check(p1 >= 1.8 && p2 >= 1.8, "theta0 %.4f, h %.2f -> %.2f: order lambda1 %.2f, lambda2 %.2f", t,
              0.08 / (1 << k), 0.04 / (1 << k), p1, p2);
    }
  }
}

// ---- 5 ----------------------------------------------------------------------------

void gap_verdicts(Criterion& c) {
  const Surface sphere(RoundSphere{1.0}, 64);
  const double root = std::sqrt(4.0 + 4.0 * 2.0);
  const double b12 = 1.0 + 1.0, b22 = 1.0 + root - 1.5;
  c.check(std::abs(b12 - 2.0) < 1e-15 && std::abs(b22 - 2.9641) < 1e-4,
          "hemisphere bounds at D = pi: %.4f and %.4f", b12, b22);
  c.check(4.0 > b12 && 4.0 > b22, "hemisphere gap 4 exceeds both");
  for (double t : {kPi / 6, kPi / 4, kPi / 3, kPi / 2}) {
    const GeodesicDomain d = make_polar_cap(sphere, t);
    const RadialOracleResult o = radial_oracle(d.profile, d.r0);
    const GapReport g = verify_gap(o.lambda1, o.lambda2, d, 0.0);  // uses the upper end of the diameter bracket
    const double pd = kPi * kPi / (4.0 * t * t);
    const double exact1 = pd + 1.0, exact2 = pd + std::sqrt(4.0 + 4.0 * o.lambda1) - 1.5;
    c.check(g.gap > exact1 && g.gap > exact2, "theta0 %.4f: gap %.4f vs %.4f and %.4f at D = 2 theta0", t, g.gap,
            exact1, exact2);
    c.check(g.verdict_curvature && g.verdict_sphere, "theta0 %.4f: also with D = %.4f (bracket top)", t, g.D_upper);
  }
}

// ---- 6 ----------------------------------------------------------------------------

void log_concavity(Criterion& c) {
  const Surface sphere(RoundSphere{1.0}, 64);
  for (double t : {kPi / 3, kPi / 2}) {
    const GeodesicDomain d = make_polar_cap(sphere, t);
    double prev_lc = INFINITY, prev_w = INFINITY;
    for (double h : {0.08, 0.04, 0.02}) {
      const SpectralSolution s = solve_dirichlet(assemble(triangulate(d, h)), 3);
      const RecoveredField f = recover_derivatives(s, d);
      const ConcavityReport r = verify_log_concavity(f, d, 0.0, -1.0, h);
      const double lc_margin = r.tau_c - r.global_max, w_margin = r.wang_bound + r.tau_c - r.hess_max;
      c.check(r.verdict, "theta0 %.4f h %.2f: max eig %.4f <= tau %.4f", t, h, r.global_max, r.tau_c);
      c.check(r.wang_verdict, "theta0 %.4f h %.2f: Hess v max %.4f <= %.4f + tau", t, h, r.hess_max, r.wang_bound);
      c.check(lc_margin < prev_lc && w_margin < prev_w, "theta0 %.4f h %.2f: margins %.4f, %.4f shrink", t, h,
              lc_margin, w_margin);
      c.info("theta0 %.4f h %.2f: without tolerance the bound is missed by %.4f; halved bound %.4f holds", t, h,
             r.hess_max - r.wang_bound, r.wang_corrected_bound);
      prev_lc = lc_margin, prev_w = w_margin;
    }
  }
}

// ---- 7 ----------------------------------------------------------------------------

void barrier_identity(Criterion& c) {
  for (double eps : {0.8, 0.9}) {
    const GeodesicDomain d = make_cap(Surface(SurfaceOfRevolution{ProfileCurve::ellipsoid(eps)}, 128), 0.6);
    const SpectralSolution s = solve_dirichlet(assemble(triangulate(d, 0.03)), 3);
    const RecoveredField f = recover_derivatives(s, d);
    for (double C : {-0.5 * d.kappa_inf, 0.0, 0.5}) {
      const double res = barrier_identity_residual(f, C, s.lambda[0]);
      c.check(res <= 1e-8, "eps %.2f C %+.3f: relative residual %.1e over %zu points", eps, C, res, f.points.size());
    }
  }
}

// ---- 8 ----------------------------------------------------------------------------

void ricci_closed_forms(Criterion& c) {
  const double m = ode_bounds(6.0 / 7.0, std::log(1.5)).margin;
  c.check(std::abs(m - 1.0 / 11.0) <= 1e-12, "margin at log(3/2): %.15f", m);
  const OnsetTimes o = onset_times(6.0 / 7.0);
  c.check(std::abs(o.t_off - 0.67485) <= 1e-4, "t_off %.6f (t_on %.6f)", o.t_off, o.t_on);
  const OnsetTimes near = onset_times(1.0 - 1e-4);
  c.check(std::abs(near.t_on - std::log(1.2)) <= 1e-3, "alpha 1 - 1e-4: t_on %.6f vs log(6/5) %.6f", near.t_on,
          std::log(1.2));
}

// ---- 9 ----------------------------------------------------------------------------

void flow_properties(Criterion& c) {
  const ConformalFlow flow(512);
  FlowState round = round_initial_state(flow);
  for (int i = 0; i < 10; ++i) round = flow_step(flow, round, 1e-4);
  const double drift = std::max(round.phi.cwiseAbs().maxCoeff(), std::abs(round.kappa_max - 1.0));
  c.check(drift <= 1e-12, "round data drift %.1e", drift);

  const double alpha = 6.0 / 7.0;
  const DominanceTrace tr = dominance_trace(flow, pinched_initial_state(flow, alpha), alpha, 0.6, 1e-4);
  double area_dev = 0, excess = -INFINITY, harnack = INFINITY;
  const double a0 = tr.rows.front().area;
  for (const auto& r : tr.rows) {
    area_dev = std::max(area_dev, std::abs(r.area - a0) / a0);
    if (r.t == 0.0) continue;
    excess = std::max({excess, r.kappa_max - r.kappa_max_bound, r.kappa_min_bound - r.kappa_min});
    harnack = std::min(harnack, r.harnack_floor_gap);
  }
  c.check(area_dev <= 1e-4, "relative area deviation %.1e", area_dev);
  c.check(excess < 0.0, "largest bound excess %.4f over %zu steps", excess, tr.rows.size() - 1);
  c.check(harnack >= -1e-2, "Harnack quantity minus floor, minimum %.4f", harnack);
  if (tr.first_positive_closed && tr.first_positive_measured)
    c.info("dominance margin first positive: closed form t = %.4f, measured t = %.4f", *tr.first_positive_closed,
           *tr.first_positive_measured);
}

// ---- 10 ---------------------------------------------------------------------------

void determinism(Criterion& c) {
  const std::filesystem::path cfg = std::filesystem::path(GAPKIT_SOURCE_DIR) / "configs/reference.json";
  const RunReport a = run_file(cfg), b = run_file(cfg);
  c.check(a.exit_code == 0, "reference run exit code %d", a.exit_code);
  const std::string sa = a.body.dump(2), sb = b.body.dump(2);
  c.check(sa == sb, "two runs give identical reports without timings (%zu bytes)", sa.size());
  c.check(a.document().dump(2).size() > sa.size(), "timings kept apart from the report body");
}

}  // namespace

int main() {
  run_criterion(1, "ellipsoid pole closed form", 1, pole_closed_form);
  run_criterion(2, "threshold reproduction", 1, threshold);
  run_criterion(3, "triaxial scan", 30, triaxial);
  run_criterion(4, "eigen solver oracles", 180, eigen_oracles);
  run_criterion(5, "gap verdicts", 120, gap_verdicts);
  run_criterion(6, "log-concavity certification", 120, log_concavity);
  run_criterion(7, "barrier identity", 30, barrier_identity);
  run_criterion(8, "Ricci closed forms", 1, ricci_closed_forms);
  run_criterion(9, "flow simulation properties", 180, flow_properties);
  run_criterion(10, "determinism", 10, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
