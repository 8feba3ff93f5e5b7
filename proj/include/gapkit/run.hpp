#pragma once
// Config-driven pipeline: surface -> domain -> eigen -> verify, with conditions,
// the threshold sweep and the flow run as independent tasks.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gapkit/io.hpp"
#include "gapkit/radial.hpp"

namespace gapkit {

inline constexpr const char* kVersion = "gapkit 1.0.0";
inline constexpr const char* kReportDirEnv = "GAPKIT_REPORT_DIR";

struct SolverParams {
  double h = 0.05;
  int k = 3;
  double tol = 1e-10;
  int max_iter = 500;
};

struct VerifyParams {
  double C = 0.0;
  std::optional<double> tau_c;  // default budget when empty
  bool samples = true;          // keep the Hessian grid in the report
};

struct ConditionEntry {
  std::string kind = "general";
  double C = 0.0;
  json lambda_lb = "myers";  // number, "myers" or "ling"
  int resolution = 64;
  bool samples = false;
};

/// Sign change of pole(eps) + coefficient (times eps^2 when weighted) over [lo, hi].
struct ThresholdEntry {
  double coefficient = 11.0;
  bool weighted = false;
  double lo = 0.6, hi = 1.0;
  int samples = 64;
};

struct FlowParams {
  double alpha = 6.0 / 7.0;
  int grid = 64;
  double dt = 1e-3;
  double horizon = 0.6;
};

struct RunConfig {
  json surface;              // object or file path, as written
  std::vector<json> domains;  // {"name", "cap"|"disk", "surface"?, "mesh_h"?}
  std::vector<ConditionEntry> conditions;
  std::optional<ThresholdEntry> threshold;
  SolverParams solver;
  VerifyParams verify;
  std::optional<FlowParams> flow;
  int surface_resolution = 64;
  std::string report_dir = "reports";
  std::string report_name = "report.json";
  bool deterministic = true;  // always on; there is no seeded randomness
  std::filesystem::path base = ".";  // directory of the config file, not serialised
};

inline RunConfig config_from_json(const json& j, const std::filesystem::path& base = ".") {
  RunConfig c;
  c.base = base;
  if (j.contains("surface")) c.surface = j["surface"];
  if (j.contains("domains"))
    for (const auto& d : j["domains"]) c.domains.push_back(d);
  if (j.contains("conditions"))
    for (const auto& e : j["conditions"]) {
      ConditionEntry ce;
      ce.kind = e.value("kind", ce.kind);
      ce.C = e.value("C", ce.C);
      if (e.contains("lambda_lb")) ce.lambda_lb = e["lambda_lb"];
      ce.resolution = e.value("resolution", ce.resolution);
      ce.samples = e.value("samples", ce.samples);
      c.conditions.push_back(ce);
    }
  if (j.contains("threshold") && !j["threshold"].is_null()) {
    const json& t = j["threshold"];
    ThresholdEntry te;
    te.coefficient = t.value("coefficient", te.coefficient);
    te.weighted = t.value("weighted", te.weighted);
    te.lo = t.value("lo", te.lo);
    te.hi = t.value("hi", te.hi);
    te.samples = t.value("samples", te.samples);
    c.threshold = te;
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    c.solver.h = s.value("h", c.solver.h);
    c.solver.k = s.value("k", c.solver.k);
    c.solver.tol = s.value("tol", c.solver.tol);
    c.solver.max_iter = s.value("max_iter", c.solver.max_iter);
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    c.verify.C = v.value("C", c.verify.C);
    if (v.contains("tau_c") && !v["tau_c"].is_null()) c.verify.tau_c = v["tau_c"].get<double>();
    c.verify.samples = v.value("samples", c.verify.samples);
  }
  if (j.contains("flow") && !j["flow"].is_null()) {
    const json& f = j["flow"];
    FlowParams fp;
    fp.alpha = f.value("alpha", fp.alpha);
    fp.grid = f.value("grid", fp.grid);
    fp.dt = f.value("dt", fp.dt);
    fp.horizon = f.value("horizon", fp.horizon);
    c.flow = fp;
  }
  c.surface_resolution = j.value("surface_resolution", c.surface_resolution);
  if (j.contains("output")) {
    c.report_dir = j["output"].value("dir", c.report_dir);
    c.report_name = j["output"].value("report", c.report_name);
  }
  c.deterministic = j.value("deterministic", true);
  if (!c.deterministic) throw std::invalid_argument("config: deterministic mode cannot be switched off");
  if (!(c.solver.h > 0.0) || !(c.solver.tol > 0.0) || c.solver.k < 2 || c.solver.max_iter < 1)
    throw std::invalid_argument("config: solver parameters must be positive (k >= 2)");
  if (c.flow && (!(c.flow->dt > 0.0) || !(c.flow->horizon > 0.0) || c.flow->grid < 8))
    throw std::invalid_argument("config: flow parameters must be positive (grid >= 8)");
  return c;
}

inline json config_to_json(const RunConfig& c) {
  json j;
  j["surface"] = c.surface;
  j["domains"] = c.domains;
  json conds = json::array();
  for (const auto& e : c.conditions)
    conds.push_back({{"kind", e.kind}, {"C", e.C}, {"lambda_lb", e.lambda_lb}, {"resolution", e.resolution},
                     {"samples", e.samples}});
  j["conditions"] = conds;
  j["threshold"] = c.threshold ? json{{"coefficient", c.threshold->coefficient},
                                      {"weighted", c.threshold->weighted},
                                      {"lo", c.threshold->lo},
                                      {"hi", c.threshold->hi},
                                      {"samples", c.threshold->samples}}
                               : json(nullptr);
  j["solver"] = {{"h", c.solver.h}, {"k", c.solver.k}, {"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}};
  j["verify"] = {{"C", c.verify.C}, {"tau_c", c.verify.tau_c ? json(*c.verify.tau_c) : json(nullptr)},
                 {"samples", c.verify.samples}};
  j["flow"] = c.flow ? json{{"alpha", c.flow->alpha}, {"grid", c.flow->grid}, {"dt", c.flow->dt},
                            {"horizon", c.flow->horizon}}
                     : json(nullptr);
  j["surface_resolution"] = c.surface_resolution;
  j["output"] = {{"dir", c.report_dir}, {"report", c.report_name}};
  j["deterministic"] = c.deterministic;
  return j;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path), path.has_parent_path() ? path.parent_path() : ".");
}

/// Report location; the environment variable overrides the configured directory.
inline std::filesystem::path report_path(const RunConfig& c) {
  const char* env = std::getenv(kReportDirEnv);
  std::filesystem::path dir = env && *env ? std::filesystem::path(env) : std::filesystem::path(c.report_dir);
  if (dir.is_relative() && !(env && *env)) dir = c.base / dir;
  return dir / c.report_name;
}

// ---- verdicts -----------------------------------------------------------------------

/// One checked relation lhs REL rhs, stored so that it can be recomputed.
inline json verdict_entry(const std::string& task, const std::string& name, double lhs, const std::string& rel,
                          double rhs) {
  bool pass = false;
  if (rel == ">") pass = lhs > rhs;
  else if (rel == ">=") pass = lhs >= rhs;
  else if (rel == "<") pass = lhs < rhs;
  else if (rel == "<=") pass = lhs <= rhs;
  else throw std::invalid_argument("verdict_entry: bad relation " + rel);
  return {{"task", task}, {"name", name}, {"lhs", num(lhs)}, {"relation", rel}, {"rhs", num(rhs)}, {"pass", pass}};
}

inline bool recompute_verdict(const json& v) {
  if (v.at("lhs").is_null() || v.at("rhs").is_null()) return false;
  const double a = v["lhs"].get<double>(), b = v["rhs"].get<double>();
  const std::string rel = v.at("relation").get<std::string>();
  if (rel == ">") return a > b;
  if (rel == ">=") return a >= b;
  if (rel == "<") return a < b;
  if (rel == "<=") return a <= b;
  throw std::invalid_argument("recompute_verdict: bad relation " + rel);
}

// ---- run ----------------------------------------------------------------------------

struct RunReport {
  json body;     // deterministic part
  json timings;  // wall-clock seconds per task
  int exit_code = 0;

  json document() const {
    json j = body;
    j["timings"] = timings;
    return j;
  }
};

namespace detail {

struct TaskRunner {
  json& tasks;
  json& timings;
  json& verdicts;
  bool error = false;

  /// Runs fn unless a dependency failed; records status and timing.
  bool operator()(const std::string& name, const std::vector<std::string>& deps, const std::function<json()>& fn) {
    for (const auto& d : deps) {
      const json& t = tasks.at(d);
      if (t.at("status") != "ok") {
        tasks[name] = {{"status", "skipped"}, {"reason", "dependency " + d + " did not complete"}};
        return false;
      }
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      json out = fn();
      out["status"] = "ok";
      // status first for readability
      json ordered{{"status", "ok"}};
      for (auto it = out.begin(); it != out.end(); ++it)
        if (it.key() != "status") ordered[it.key()] = it.value();
      tasks[name] = std::move(ordered);
    } catch (const std::exception& e) {
      tasks[name] = {{"status", "failed"}, {"error", e.what()}};
      error = true;
    }
    timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return tasks[name]["status"] == "ok";
  }
};

inline double lambda_from_entry(const json& lb, const Surface& s, const std::optional<GeodesicDomain>& first,
                                LambdaSource& src) {
  if (lb.is_number()) {
    src = LambdaSource::User;
    return lb.get<double>();
  }
  const std::string mode = lb.get<std::string>();
  src = lambda_source_from_string(mode);
  if (src == LambdaSource::Ling) {
    if (!first) throw std::invalid_argument("lambda_lb = ling needs a domain for the inscribed diameter");
    return lambda_lower_bound(s.kappa_min(), first->diameter.d, 2, LambdaSource::Ling);
  }
  return lambda_lower_bound(s.kappa_min(), 0.0, 2, src);
}

}  // namespace detail

/// Runs every task of the config in dependency order. Exit code: 1 if any task
/// failed to execute, else 2 if any verdict fails, else 0.
inline RunReport run(const RunConfig& cfg) {
  RunReport rep;
  json tasks = json::object(), verdicts = json::array();
  rep.timings = json::object();
  detail::TaskRunner task{tasks, rep.timings, verdicts};

  std::optional<Surface> surface;
  json surface_json;
  task("surface", {}, [&] {
    surface_json = resolve_surface(cfg.surface, cfg.base);
    surface.emplace(surface_from_json(surface_json));
    const auto grid = curvature_grid(*surface, cfg.surface_resolution);
    double worst = INFINITY;
    ChartPoint at;
    for (const auto& g : grid)
      if (g.delta_log_kappa - 5.0 * g.kappa < worst) worst = g.delta_log_kappa - 5.0 * g.kappa, at = g.point;
    json out{{"model", surface_json},
             {"kind", surface->kind()},
             {"kappa_min", surface->kappa_min()},
             {"kappa_max", surface->kappa_max()},
             {"min_dlk_minus_5kappa", worst},
             {"argmin", {at.u, at.v}}};
    const bool closed = !std::holds_alternative<ParametricSurface>(surface->model()) ||
                        std::get<ParametricSurface>(surface->model()).closed;
    if (closed) {
      const double gb = gauss_bonnet_integral(*surface, 512);
      out["gauss_bonnet_residual"] = std::abs(gb - 4.0 * std::numbers::pi) / (4.0 * std::numbers::pi);
    }
    return out;
  });

  // domains come before conditions so that "ling" can use the first one
  std::vector<std::optional<GeodesicDomain>> domains(cfg.domains.size());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < cfg.domains.size(); ++i) {
    const json& dj = cfg.domains[i];
    const std::string name = dj.value("name", "domain" + std::to_string(i));
    names.push_back(name);
    const bool flat = dj.contains("disk");
    const bool own_surface = dj.contains("surface");
    task("domain:" + name, flat || own_surface ? std::vector<std::string>{} : std::vector<std::string>{"surface"}, [&] {
      json spec = dj;
      spec.erase("name");
      if (!flat && !own_surface) spec["surface"] = surface_json;
      const DomainSpec ds = domain_spec_from_json(spec, cfg.base);
      domains[i] = build_domain(ds);
      return json{{"spec", domain_spec_to_json(ds)}, {"domain", domain_json(*domains[i])}};
    });
  }

  for (std::size_t i = 0; i < cfg.conditions.size(); ++i) {
    const auto& ce = cfg.conditions[i];
    const std::string name = "condition:" + std::to_string(i);
    std::vector<std::string> deps{"surface"};
    if (ce.lambda_lb.is_string() && ce.lambda_lb.get<std::string>() == "ling" && !names.empty())
      deps.push_back("domain:" + names[0]);
    if (task(name, deps, [&] {
          ConditionSpec spec;
          spec.kind = condition_kind_from_string(ce.kind);
          spec.C = ce.C;
          spec.lambda_lb =
              detail::lambda_from_entry(ce.lambda_lb, *surface, domains.empty() ? std::nullopt : domains[0],
                                        spec.lambda_source);
          if (spec.kind == ConditionKind::SpectralDominance || spec.kind == ConditionKind::PinchedCHalf ||
              spec.kind == ConditionKind::TriaxialQuantity)
            spec.C = -0.5 * surface->kappa_min();
          if (spec.kind == ConditionKind::PinchedC0) spec.C = 0.0;
          const ConditionReport r = check_condition(*surface, spec, ce.resolution);
          return json{{"report", condition_report_json(r, ce.samples)}};
        }))
      verdicts.push_back(verdict_entry(name, "min_margin > 0", tasks[name]["report"]["min_margin"].get<double>(), ">",
                                       0.0));
  }

  if (cfg.threshold) {
    const ThresholdEntry te = *cfg.threshold;
    task("threshold", {}, [&] {
      auto margin = [&](double e) { return ellipsoid_pole_value(e) + te.coefficient * (te.weighted ? e * e : 1.0); };
      const ThresholdResult r = threshold_solve(margin, te.lo, te.hi, te.samples);
      json sweep = json::array();
      for (const auto& [e, m] : r.sweep) sweep.push_back({e, m});
      return json{{"family", te.weighted ? "pole value + c eps^2" : "pole value + c"},
                  {"coefficient", te.coefficient},
                  {"parameter", r.parameter},
                  {"bracket", {r.bracket_lo, r.bracket_hi}},
                  {"monotone_near_root", r.monotone_near_root},
                  {"sweep", sweep}};
    });
  }

  for (std::size_t i = 0; i < cfg.domains.size(); ++i) {
    const std::string& name = names[i];
    std::optional<SpectralSolution> sol;
    task("eigen:" + name, {"domain:" + name}, [&] {
      const TriMesh mesh = triangulate(*domains[i], cfg.solver.h);
      const Operators ops = assemble(mesh);
      sol = solve_dirichlet(ops, cfg.solver.k, cfg.solver.tol, cfg.solver.max_iter);
      return json{{"solution", spectral_json(*sol)}};
    });
    const std::string vname = "verify:" + name;
    if (task(vname, {"eigen:" + name}, [&] {
          const RecoveredField field = recover_derivatives(*sol, *domains[i]);
          const double tau = cfg.verify.tau_c ? *cfg.verify.tau_c : -1.0;
          const ConcavityReport cr = verify_log_concavity(field, *domains[i], cfg.verify.C, tau, sol->h);
          const BarrierReport br = barrier_margin(field, curvature_barrier(cfg.verify.C), sol->lambda[0]);
          const GapReport gr = verify_gap(*sol, *domains[i], cfg.verify.C);
          return json{{"recovery",
                       {{"delta", field.delta},
                        {"grid_step", field.grid_step},
                        {"points", field.points.size()},
                        {"identity_sup", field.identity_sup},
                        {"w_residual_sup", field.w_residual_sup}}},
                      {"concavity", concavity_report_json(cr, cfg.verify.samples)},
                      {"barrier", barrier_report_json(br)},
                      {"gap", gap_report_json(gr)}};
        })) {
      const json& t = tasks[vname];
      const json& c = t["concavity"];
      verdicts.push_back(verdict_entry(vname, "log-concavity max eigenvalue <= tau_c", c["global_max"].get<double>(),
                                       "<=", c["tau_c"].get<double>()));
      if (c["sphere_mode"].get<bool>())
        verdicts.push_back(verdict_entry(vname, "Hess v max eigenvalue <= constant-curvature bound + tau_c",
                                         c["hess_max"].get<double>(), "<=",
                                         c["wang_bound"].get<double>() + c["tau_c"].get<double>()));
      verdicts.push_back(verdict_entry(vname, "barrier margin > 0", t["barrier"]["min_margin"].get<double>(), ">", 0.0));
      const json& g = t["gap"];
      verdicts.push_back(verdict_entry(vname, "gap > pi^2/D^2 + inf kappa + C", g["gap"].get<double>(), ">",
                                       g["bound_curvature"].get<double>()));
      if (g["sphere_mode"].get<bool>())
        verdicts.push_back(verdict_entry(vname, "gap > pi^2/D^2 + sqrt(4 + 4 lambda1) - 3/2", g["gap"].get<double>(), ">",
                                         g["bound_sphere"].get<double>()));
    }
  }

  if (cfg.flow) {
    const FlowParams fp = *cfg.flow;
    if (task("flow", {}, [&] {
          const ConformalFlow flow(fp.grid);
          const FlowState s0 = pinched_initial_state(flow, fp.alpha);
          const DominanceTrace tr = dominance_trace(flow, s0, fp.alpha, fp.horizon, fp.dt);
          double bound_excess = -INFINITY, area_dev = 0.0, harnack_gap = INFINITY;
          for (const auto& r : tr.rows) {
            area_dev = std::max(area_dev, std::abs(r.area - 4.0 * std::numbers::pi) / (4.0 * std::numbers::pi));
            if (!std::isnan(r.kappa_max_bound))
              bound_excess = std::max({bound_excess, r.kappa_max - r.kappa_max_bound, r.kappa_min_bound - r.kappa_min});
            if (!std::isnan(r.harnack_floor_gap)) harnack_gap = std::min(harnack_gap, r.harnack_floor_gap);
          }
          json out{{"params", {{"alpha", fp.alpha}, {"grid", fp.grid}, {"dt", fp.dt}, {"horizon", fp.horizon}}},
                   {"max_bound_excess", num(bound_excess)},
                   {"max_area_deviation", area_dev},
                   {"min_harnack_gap", num(harnack_gap)}};
          if (fp.alpha > 0.0 && fp.alpha < 1.0) {
            try {
              const OnsetTimes o = onset_times(fp.alpha);
              out["onset"] = {{"t_on", o.t_on}, {"t_off", num(o.t_off)}};
            } catch (const std::runtime_error&) {
              out["onset"] = nullptr;
            }
          }
          out["trace"] = trace_json(tr);
          return out;
        })) {
      const json& f = tasks["flow"];
      if (!f["max_bound_excess"].is_null())
        verdicts.push_back(verdict_entry("flow", "curvature stays inside the comparison bounds",
                                         f["max_bound_excess"].get<double>(), "<", 0.0));
      verdicts.push_back(verdict_entry("flow", "area deviation <= 1e-4", f["max_area_deviation"].get<double>(), "<=", 1e-4));
      if (!f["min_harnack_gap"].is_null())
        verdicts.push_back(verdict_entry("flow", "Harnack quantity above its floor (slack 1e-2)",
                                         f["min_harnack_gap"].get<double>(), ">=", -1e-2));
    }
  }

  bool all_pass = true;
  for (const auto& v : verdicts) all_pass = all_pass && v["pass"].get<bool>();
  rep.exit_code = task.error ? 1 : (all_pass ? 0 : 2);
  json summary{{"verdicts", verdicts},
               {"all_pass", all_pass},
               {"execution_errors", task.error},
               {"exit_code", rep.exit_code}};
  json skipped = json::array();
  for (auto it = tasks.begin(); it != tasks.end(); ++it)
    if (it.value()["status"] == "skipped") skipped.push_back(it.key());
  summary["skipped"] = skipped;
  rep.body = {{"version", kVersion}, {"config", config_to_json(cfg)}, {"tasks", tasks}, {"summary", summary}};
  return rep;
}

/// Convenience for callers holding a config file: a config that cannot be
/// loaded yields a report with exit code 1.
inline RunReport run_file(const std::filesystem::path& path) {
  try {
    return run(load_config(path));
  } catch (const std::exception& e) {
    RunReport r;
    r.exit_code = 1;
    r.body = {{"version", kVersion},
              {"config_error", e.what()},
              {"summary", {{"verdicts", json::array()}, {"all_pass", false}, {"execution_errors", true}, {"exit_code", 1}}}};
    r.timings = json::object();
    return r;
  }
}

// ---- plot data ------------------------------------------------------------------------

inline const std::vector<std::string>& plot_selectors() {
  static const std::vector<std::string> s{"margin_vs_epsilon", "flow_trace", "hessian_max_eig"};
  return s;
}

/// Writes tidy CSV files for the selector into out_dir and returns their paths.
inline std::vector<std::filesystem::path> emit_plot_data(const json& report, const std::string& selector,
                                                         const std::filesystem::path& out_dir) {
  auto nan_or = [](const json& x) { return x.is_null() ? NAN : x.get<double>(); };
  const json tasks = report.value("tasks", json::object());
  std::vector<std::filesystem::path> out;
  if (selector == "margin_vs_epsilon") {
    if (!tasks.contains("threshold") || tasks["threshold"]["status"] != "ok")
      throw std::invalid_argument("report has no threshold sweep");
    std::vector<std::vector<double>> rows;
    for (const auto& r : tasks["threshold"]["sweep"]) rows.push_back({r[0].get<double>(), r[1].get<double>()});
    out.push_back(out_dir / "margin_vs_epsilon.csv");
    write_csv(out.back(), {"epsilon", "margin"}, rows);
  } else if (selector == "flow_trace") {
    if (!tasks.contains("flow") || tasks["flow"]["status"] != "ok") throw std::invalid_argument("report has no flow trace");
    std::vector<std::vector<double>> rows;
    for (const auto& r : tasks["flow"]["trace"]["rows"]) {
      std::vector<double> row;
      for (const auto& x : r) row.push_back(nan_or(x));
      rows.push_back(row);
    }
    out.push_back(out_dir / "flow_trace.csv");
    write_csv(out.back(), trace_columns(), rows);
  } else if (selector == "hessian_max_eig") {
    for (auto it = tasks.begin(); it != tasks.end(); ++it) {
      if (it.key().rfind("verify:", 0) != 0 || it.value()["status"] != "ok") continue;
      const json& c = it.value()["concavity"];
      if (!c.contains("samples")) continue;
      std::vector<std::vector<double>> rows;
      for (const auto& r : c["samples"]) rows.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>()});
      out.push_back(out_dir / ("hessian_max_eig_" + it.key().substr(7) + ".csv"));
      write_csv(out.back(), {"u", "v", "value"}, rows);
    }
    if (out.empty()) throw std::invalid_argument("report has no concavity samples");
  } else {
    throw std::invalid_argument("unknown selector: " + selector);
  }
  return out;
}

}  // namespace gapkit
