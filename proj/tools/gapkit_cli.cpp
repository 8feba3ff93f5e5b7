// gapkit command-line entry point.
//
// Exit codes: 0 all verdicts pass, 2 a verdict fails, 1 execution error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gapkit/gapkit.hpp"

namespace fs = std::filesystem;
using namespace gapkit;

namespace {

enum class Mode { Text, Json, Quiet };
Mode g_mode = Mode::Text;

// Prints text lines in text mode, the JSON object in json mode.
void emit(const json& j, const std::string& text) {
  if (g_mode == Mode::Json) std::cout << j.dump(2) << "\n";
  else if (g_mode == Mode::Text) std::cout << text;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

fs::path base_of(const fs::path& p) { return p.has_parent_path() ? p.parent_path() : fs::path("."); }

DomainSpec load_domain_spec(const fs::path& file) { return domain_spec_from_json(read_json_file(file), base_of(file)); }

/// Solution file written by `eigen solve`: domain spec, h, eigenvalues and GSVF field refs.
struct LoadedSolution {
  GeodesicDomain domain;
  SpectralSolution solution;
};

LoadedSolution load_solution(const fs::path& file) {
  const json j = read_json_file(file);
  const DomainSpec ds = domain_spec_from_json(j.at("domain"), base_of(file));
  LoadedSolution out{build_domain(ds), {}};
  auto mesh = std::make_shared<const TriMesh>(triangulate(out.domain, j.at("h").get<double>()));
  SpectralSolution& s = out.solution;
  s.mesh = mesh;
  s.h = mesh->h;
  s.vertex_count = mesh->vertex_count();
  s.interior_count = mesh->interior_count();
  s.lambda = j.at("solution").at("lambda").get<std::vector<double>>();
  s.residuals = j["solution"].at("residuals").get<std::vector<double>>();
  for (const auto& f : j.at("fields")) {
    Eigen::VectorXd u = read_gsvf(base_of(file) / f.get<std::string>());
    if (static_cast<std::size_t>(u.size()) != s.vertex_count)
      throw IoError("field size does not match the rebuilt mesh");
    s.modes.push_back(std::move(u));
  }
  if (s.modes.size() < 2) throw IoError("solution needs the u1 and u2 fields");
  return out;
}

int verdict_code(bool pass) { return pass ? 0 : 2; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature conditions, Dirichlet eigenvalues, log-concavity and gap checks, normalised Ricci flow"};
  app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with the mesh spacing option --h
  app.require_subcommand(1);
  app.fallthrough();
  // option callbacks of the main app run before any subcommand callback
  app.add_flag_callback("--quiet", [] { g_mode = Mode::Quiet; }, "Print nothing; rely on the exit code and written files");
  app.add_flag_callback("--json", [] { g_mode = Mode::Json; }, "Print results as JSON");
  app.set_version_flag("--version", kVersion);

  int code = 0;

  // surface info
  auto* surface = app.add_subcommand("surface", "Surface models");
  surface->require_subcommand(1);
  auto* surface_info = surface->add_subcommand("info", "Curvature extrema, Gauss-Bonnet residual, min of dlk - 5 kappa");
  std::string surface_file;
  int resolution = 64;
  surface_info->add_option("--surface", surface_file, "Surface JSON file")->required()->check(CLI::ExistingFile);
  surface_info->add_option("--resolution", resolution, "Grid samples per axis")->check(CLI::PositiveNumber);
  surface_info->callback([&] {
    const Surface s(surface_from_json(read_json_file(surface_file)));
    const auto grid = curvature_grid(s, resolution);
    double worst = INFINITY;
    ChartPoint at;
    for (const auto& g : grid)
      if (g.delta_log_kappa - 5.0 * g.kappa < worst) worst = g.delta_log_kappa - 5.0 * g.kappa, at = g.point;
    json j{{"kind", s.kind()},
           {"kappa_min", s.kappa_min()},
           {"kappa_max", s.kappa_max()},
           {"min_dlk_minus_5kappa", worst},
           {"argmin", {at.u, at.v}}};
    std::string text = "kind " + s.kind() + "\nkappa_min " + fmt(s.kappa_min()) + "\nkappa_max " + fmt(s.kappa_max()) +
                       "\nmin (dlk - 5 kappa) " + fmt(worst) + " at (" + fmt(at.u) + ", " + fmt(at.v) + ")\n";
    const auto* p = std::get_if<ParametricSurface>(&s.model());
    if (!p || p->closed) {
      const double gb = gauss_bonnet_integral(s, 512);
      j["gauss_bonnet_residual"] = std::abs(gb - 4.0 * std::numbers::pi) / (4.0 * std::numbers::pi);
      text += "Gauss-Bonnet residual " + fmt(j["gauss_bonnet_residual"].get<double>()) + "\n";
    }
    emit(j, text);
  });

  // domain build|info
  auto* domain = app.add_subcommand("domain", "Convex caps");
  domain->require_subcommand(1);
  std::string domain_file, mesh_out;
  double mesh_h = 0.05;
  auto* domain_build = domain->add_subcommand("build", "Triangulate a cap and export the mesh");
  domain_build->add_option("--domain", domain_file, "Domain JSON file")->required()->check(CLI::ExistingFile);
  domain_build->add_option("--h", mesh_h, "Target edge length")->check(CLI::PositiveNumber);
  domain_build->add_option("--mesh", mesh_out, "Output mesh file (node/element text)")->required();
  domain_build->callback([&] {
    const GeodesicDomain d = build_domain(load_domain_spec(domain_file));
    const TriMesh m = triangulate(d, mesh_h);
    write_text_file(mesh_out, mesh_text(m));
    emit({{"mesh", mesh_out}, {"vertices", m.vertex_count()}, {"interior", m.interior_count()},
          {"triangles", m.triangles.size()}, {"h", m.h}},
         "wrote " + mesh_out + ": " + std::to_string(m.vertex_count()) + " vertices (" +
             std::to_string(m.interior_count()) + " interior), " + std::to_string(m.triangles.size()) +
             " triangles, h " + fmt(m.h) + "\n");
  });
  auto* domain_info = domain->add_subcommand("info", "Convexity certificate, diameter bracket, inscribed diameter, area");
  domain_info->add_option("--domain", domain_file, "Domain JSON file")->required()->check(CLI::ExistingFile);
  domain_info->callback([&] {
    try {
      const GeodesicDomain d = build_domain(load_domain_spec(domain_file));
      emit(domain_json(d), "k_g " + fmt(d.kg) + (d.limiting_convex ? " (limiting convex)" : "") + "\nD " +
                               fmt(d.diameter.D) + " in [" + fmt(d.diameter.lower) + ", " + fmt(d.diameter.upper) +
                               "]\nd " + fmt(d.diameter.d) + "\narea " + fmt(d.area) + "\n");
    } catch (const DomainRejected& e) {
      emit({{"rejected", true}, {"kg", e.kg}}, std::string("rejected: ") + e.what() + "\n");
      code = 2;
    }
  });

  // check condition
  auto* check = app.add_subcommand("check", "Pointwise curvature conditions");
  check->require_subcommand(1);
  auto* check_condition_cmd = check->add_subcommand("condition", "Margin field and verdict of one condition");
  std::string kind = "general", lambda_arg = "myers", report_out, samples_out;
  double C = 0.0;
  check_condition_cmd->add_option("--surface", surface_file, "Surface JSON file")->required()->check(CLI::ExistingFile);
  check_condition_cmd->add_option("--kind", kind, "general|pinched-C0|pinched-Chalf|spectral-dominance|triaxial-quantity");
  check_condition_cmd->add_option("--C", C, "Barrier offset constant");
  check_condition_cmd->add_option("--lambda-lb", lambda_arg, "First-eigenvalue lower bound: a number, ling or myers");
  check_condition_cmd->add_option("--domain", domain_file, "Domain for the ling bound")->check(CLI::ExistingFile);
  check_condition_cmd->add_option("--resolution", resolution, "Grid samples per axis")->check(CLI::PositiveNumber);
  check_condition_cmd->add_option("--report", report_out, "Report JSON file");
  check_condition_cmd->add_option("--samples", samples_out, "Per-point margins as CSV");
  check_condition_cmd->callback([&] {
    const Surface s(surface_from_json(read_json_file(surface_file)));
    ConditionSpec spec;
    spec.kind = condition_kind_from_string(kind);
    spec.C = C;
    if (lambda_arg == "myers") {
      spec.lambda_source = LambdaSource::Myers;
      spec.lambda_lb = lambda_lower_bound(s.kappa_min(), 0.0, 2, LambdaSource::Myers);
    } else if (lambda_arg == "ling") {
      if (domain_file.empty()) throw std::invalid_argument("--lambda-lb ling needs --domain");
      const GeodesicDomain d = build_domain(load_domain_spec(domain_file));
      spec.lambda_source = LambdaSource::Ling;
      spec.lambda_lb = lambda_lower_bound(s.kappa_min(), d.diameter.d, 2, LambdaSource::Ling);
    } else {
      spec.lambda_source = LambdaSource::User;
      spec.lambda_lb = std::stod(lambda_arg);
    }
    if (spec.kind == ConditionKind::SpectralDominance || spec.kind == ConditionKind::PinchedCHalf ||
        spec.kind == ConditionKind::TriaxialQuantity)
      spec.C = -0.5 * s.kappa_min();
    const ConditionReport r = check_condition(s, spec, resolution);
    json j = condition_report_json(r);
    if (!samples_out.empty()) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < r.points.size(); ++i) rows.push_back({r.points[i].u, r.points[i].v, r.margins[i]});
      write_csv(samples_out, {"u", "v", "margin"}, rows);
      j["samples_path"] = samples_out;
    }
    if (!report_out.empty()) write_json_file(report_out, j);
    emit(j, kind + " margin min " + fmt(r.min_margin) + " at (" + fmt(r.argmin.u) + ", " + fmt(r.argmin.v) + "), " +
                (r.verdict ? "satisfied" : "violated") + "\n");
    code = verdict_code(r.verdict);
  });

  // eigen solve
  auto* eigen = app.add_subcommand("eigen", "Dirichlet eigenproblem");
  eigen->require_subcommand(1);
  auto* eigen_solve = eigen->add_subcommand("solve", "k smallest Dirichlet eigenpairs on a cap");
  int k = 2;
  std::string solution_out;
  eigen_solve->add_option("--domain", domain_file, "Domain JSON file")->required()->check(CLI::ExistingFile);
  eigen_solve->add_option("--h", mesh_h, "Target edge length")->check(CLI::PositiveNumber);
  eigen_solve->add_option("-k", k, "Number of eigenpairs (>= 2)")->check(CLI::Range(2, 64));
  eigen_solve->add_option("--out", solution_out, "Solution JSON file; fields go next to it as GSVF")->required();
  eigen_solve->callback([&] {
    const DomainSpec ds = load_domain_spec(domain_file);
    const GeodesicDomain d = build_domain(ds);
    const Operators ops = assemble(triangulate(d, mesh_h));
    const SpectralSolution sol = solve_dirichlet(ops, k);
    const fs::path out(solution_out);
    json fields = json::array();
    for (std::size_t i = 0; i < sol.modes.size(); ++i) {
      const std::string name = out.stem().string() + "_u" + std::to_string(i + 1) + ".gsvf";
      write_gsvf(base_of(out) / name, sol.modes[i]);
      fields.push_back(name);
    }
    json j{{"version", kVersion}, {"domain", domain_spec_to_json(ds)}, {"h", mesh_h}, {"solution", spectral_json(sol)},
           {"fields", fields}};
    write_json_file(out, j);
    std::string text;
    for (std::size_t i = 0; i < sol.lambda.size(); ++i)
      text += "lambda" + std::to_string(i + 1) + " " + fmt(sol.lambda[i]) + "\n";
    text += "gap " + fmt(sol.gap()) + "\n";
    emit(j["solution"], text);
  });

  // verify logconcavity|gap|barrier
  auto* verify = app.add_subcommand("verify", "Certify estimates on a computed solution");
  verify->require_subcommand(1);
  std::string solution_file, csv_out;
  double tau = -1.0;
  auto add_verify = [&](const std::string& name, const std::string& help) {
    auto* c = verify->add_subcommand(name, help);
    c->add_option("--solution", solution_file, "Solution JSON from eigen solve")->required()->check(CLI::ExistingFile);
    c->add_option("--C", C, "Barrier offset constant");
    c->add_option("--report", report_out, "Report JSON file");
    return c;
  };
  auto* verify_lc = add_verify("logconcavity", "Hess log u1 + (C + kappa/2) g <= tau_c");
  verify_lc->add_option("--tau", tau, "Tolerance (default: discretisation budget)");
  verify_lc->add_option("--csv", csv_out, "Plot data (u, v, max eigenvalue)");
  verify_lc->callback([&] {
    const LoadedSolution ls = load_solution(solution_file);
    const RecoveredField f = recover_derivatives(ls.solution, ls.domain);
    const ConcavityReport r = verify_log_concavity(f, ls.domain, C, tau, ls.solution.h);
    json j = concavity_report_json(r);
    if (!report_out.empty()) write_json_file(report_out, j);
    if (!csv_out.empty()) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < r.points.size(); ++i) rows.push_back({r.points[i].x(), r.points[i].y(), r.max_eig[i]});
      write_csv(csv_out, {"u", "v", "value"}, rows);
    }
    std::string text = "max eigenvalue " + fmt(r.global_max) + " at (" + fmt(r.argmax.x()) + ", " + fmt(r.argmax.y()) +
                       "), tau_c " + fmt(r.tau_c) + ", " + (r.verdict ? "certified" : "not certified") + "\n";
    if (r.sphere_mode)
      text += "Hess v max " + fmt(r.hess_max) + " vs bound " + fmt(r.wang_bound) + " + tau_c: " +
              (r.wang_verdict ? "pass" : "fail") + "\n";
    emit(j, text);
    code = verdict_code(r.verdict && (!r.sphere_mode || r.wang_verdict));
  });
  auto* verify_gap_cmd = add_verify("gap", "Fundamental gap against the lower bounds");
  verify_gap_cmd->callback([&] {
    const LoadedSolution ls = load_solution(solution_file);
    const GapReport r = verify_gap(ls.solution, ls.domain, C);
    json j = gap_report_json(r);
    if (!report_out.empty()) write_json_file(report_out, j);
    std::string text = "gap " + fmt(r.gap) + " vs " + fmt(r.bound_curvature) + ": " +
                       (r.verdict_curvature ? "pass" : "fail") + "\n";
    if (r.sphere_mode)
      text += "gap " + fmt(r.gap) + " vs sphere bound " + fmt(r.bound_sphere) + ": " + (r.verdict_sphere ? "pass" : "fail") +
              "\n";
    emit(j, text);
    code = verdict_code(r.verdict_curvature && (!r.sphere_mode || r.verdict_sphere));
  });
  auto* verify_barrier = add_verify("barrier", "Barrier inequality margin for b = kappa/2 + C");
  verify_barrier->add_option("--csv", csv_out, "Plot data (u, v, margin)");
  verify_barrier->callback([&] {
    const LoadedSolution ls = load_solution(solution_file);
    const RecoveredField f = recover_derivatives(ls.solution, ls.domain);
    const BarrierReport r = barrier_margin(f, curvature_barrier(C), ls.solution.lambda[0]);
    json j = barrier_report_json(r);
    j["identity_residual"] = barrier_identity_residual(f, C, ls.solution.lambda[0]);
    if (!report_out.empty()) write_json_file(report_out, j);
    if (!csv_out.empty()) {
      std::vector<std::vector<double>> rows;
      for (const auto& p : r.points) rows.push_back({p.p.x(), p.p.y(), p.margin});
      write_csv(csv_out, {"u", "v", "margin"}, rows);
    }
    emit(j, "barrier margin min " + fmt(r.min_margin) + ", expansion residual " +
                fmt(j["identity_residual"].get<double>()) + ", " + (r.verdict ? "positive" : "not positive") + "\n");
    code = verdict_code(r.verdict);
  });

  // ricci bounds|onset|simulate
  auto* ricci = app.add_subcommand("ricci", "Normalised Ricci flow");
  ricci->require_subcommand(1);
  double alpha = 6.0 / 7.0, t = 0.4, dt = 1e-3, horizon = 0.6;
  int grid = 128;
  std::string trace_out;
  auto* ricci_bounds = ricci->add_subcommand("bounds", "Closed-form comparison bounds at time t");
  ricci_bounds->add_option("--alpha", alpha, "Initial pinching kappa_min/kappa_max")->required();
  ricci_bounds->add_option("--t", t, "Time")->required();
  ricci_bounds->callback([&] {
    const OdeBounds b = ode_bounds(alpha, t);
    emit({{"kappa_max", b.kappa_max}, {"kappa_min", b.kappa_min}, {"pinching", b.pinching}, {"harnack", b.harnack},
          {"margin", b.margin}},
         "kappa_max < " + fmt(b.kappa_max) + "\nkappa_min > " + fmt(b.kappa_min) + "\npinching < " + fmt(b.pinching) +
             "\nharnack floor " + fmt(b.harnack) + "\nmargin " + fmt(b.margin) + "\n");
  });
  auto* ricci_onset = ricci->add_subcommand("onset", "Roots of the dominance margin");
  ricci_onset->add_option("--alpha", alpha, "Initial pinching")->required();
  ricci_onset->callback([&] {
    const OnsetTimes o = onset_times(alpha);
    emit({{"t_on", o.t_on}, {"t_off", num(o.t_off)}},
         "t_on " + fmt(o.t_on) + "\nt_off " + (std::isnan(o.t_off) ? std::string("none") : fmt(o.t_off)) + "\n");
  });
  auto* ricci_sim = ricci->add_subcommand("simulate", "Flow a pinched rotationally symmetric metric");
  ricci_sim->add_option("--alpha", alpha, "Initial pinching")->required();
  ricci_sim->add_option("--grid", grid, "Collocation points")->check(CLI::Range(8, 4096));
  ricci_sim->add_option("--dt", dt, "Reporting step")->check(CLI::PositiveNumber);
  ricci_sim->add_option("--horizon", horizon, "Final time")->check(CLI::PositiveNumber);
  ricci_sim->add_option("--trace", trace_out, "Trace CSV file");
  ricci_sim->callback([&] {
    const ConformalFlow flow(grid);
    const DominanceTrace tr = dominance_trace(flow, pinched_initial_state(flow, alpha), alpha, horizon, dt);
    if (!trace_out.empty()) write_text_file(trace_out, trace_csv(tr));
    json j = trace_json(tr);
    j.erase("rows");
    const TraceRow& last = tr.rows.back();
    emit(j, "t " + fmt(last.t) + " kappa in [" + fmt(last.kappa_min) + ", " + fmt(last.kappa_max) + "] area " +
                fmt(last.area) + "\nfirst positive: closed form " +
                (tr.first_positive_closed ? fmt(*tr.first_positive_closed) : std::string("none")) + ", measured " +
                (tr.first_positive_measured ? fmt(*tr.first_positive_measured) : std::string("none")) + "\n");
  });

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a config end to end");
  std::string config_file, report_override;
  run_cmd->add_option("--config", config_file, "Run config JSON")->required();
  run_cmd->add_option("--report", report_override, "Report file (overrides config and environment)");
  run_cmd->callback([&] {
    RunReport r;
    fs::path out;
    try {
      const RunConfig cfg = load_config(config_file);
      r = run(cfg);
      out = report_override.empty() ? report_path(cfg) : fs::path(report_override);
    } catch (const std::exception& e) {
      r = run_file(config_file);
      out = report_override;
    }
    if (!out.empty()) write_json_file(out, r.document());
    std::string text;
    for (const auto& v : r.body["summary"]["verdicts"])
      text += std::string(v["pass"].get<bool>() ? "PASS " : "FAIL ") + v["task"].get<std::string>() + ": " +
              v["name"].get<std::string>() + "\n";
    const json tasks = r.body.value("tasks", json::object());
    for (auto it = tasks.begin(); it != tasks.end(); ++it)
      if (it.value()["status"] != "ok")
        text += it.value()["status"].get<std::string>() + " " + it.key() + ": " +
                it.value().value("error", it.value().value("reason", "")) + "\n";
    if (r.body.contains("config_error")) text += "config error: " + r.body["config_error"].get<std::string>() + "\n";
    if (!out.empty()) text += "report " + out.string() + "\n";
    emit(r.body["summary"], text);
    code = r.exit_code;
  });

  // emit
  auto* emit_cmd = app.add_subcommand("emit", "Plot data from a report");
  std::string report_in, selector, out_dir = ".";
  emit_cmd->add_option("--report", report_in, "Report JSON from run")->required()->check(CLI::ExistingFile);
  emit_cmd->add_option("--selector", selector, "margin_vs_epsilon|flow_trace|hessian_max_eig")->required();
  emit_cmd->add_option("--out", out_dir, "Output directory");
  emit_cmd->callback([&] {
    const auto files = emit_plot_data(read_json_file(report_in), selector, out_dir);
    json j = json::array();
    std::string text;
    for (const auto& f : files) j.push_back(f.string()), text += "wrote " + f.string() + "\n";
    emit(j, text);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
