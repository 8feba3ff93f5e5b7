#pragma once
// Serialisation: JSON model and domain specs, report objects, the GSVF binary
// field format, plain-text mesh export and CSV.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gapkit/conditions.hpp"
#include "gapkit/domain.hpp"
#include "gapkit/fem.hpp"
#include "gapkit/ricci.hpp"
#include "gapkit/verify.hpp"

namespace gapkit {

using json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

// ---- surfaces -----------------------------------------------------------------

/// {"kind": "sphere", "radius"} | {"kind": "revolution_ellipsoid", "epsilon"} |
/// {"kind": "triaxial", "a", "b", "c"} | {"kind": "parametric", "family": ...}.
inline SurfaceModel surface_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sphere") return RoundSphere{j.value("radius", 1.0)};
  if (kind == "revolution_ellipsoid") {
    const double eps = j.at("epsilon").get<double>();
    ProfileCurve p = ProfileCurve::ellipsoid(eps);
    if (j.contains("scale")) p = p.scaled(j["scale"].get<double>());
    return SurfaceOfRevolution{p};
  }
  if (kind == "triaxial") {
    TriaxialEllipsoid e{j.at("a").get<double>(), j.at("b").get<double>(), j.at("c").get<double>()};
    if (!(e.a > 0.0 && e.a <= e.b && e.b <= e.c))
      throw std::invalid_argument("triaxial surface needs 0 < a <= b <= c (squared semi-axes)");
    return e;
  }
  if (kind == "parametric") {
    const std::string family = j.at("family").get<std::string>();
    if (family == "conformal_sphere")
      return ParametricSurface::conformal_sphere(j.at("coefficients").get<std::vector<double>>());
    if (family == "revolution_ellipsoid")
      return ParametricSurface::revolution_chart(ProfileCurve::ellipsoid(j.at("epsilon").get<double>()));
    throw std::invalid_argument("unknown parametric family: " + family);
  }
  throw std::invalid_argument("unknown surface kind: " + kind);
}

inline json surface_to_json(const SurfaceModel& m) {
  if (const auto* s = std::get_if<RoundSphere>(&m)) return {{"kind", "sphere"}, {"radius", s->radius}};
  if (const auto* r = std::get_if<SurfaceOfRevolution>(&m)) {
    if (r->profile.family() != "revolution_ellipsoid")
      throw std::invalid_argument("surface_to_json: only ellipsoid profiles are serialisable");
    json j{{"kind", "revolution_ellipsoid"}, {"epsilon", r->profile.parameter()}};
    if (r->profile.scale() != 1.0) j["scale"] = r->profile.scale();
    return j;
  }
  if (const auto* t = std::get_if<TriaxialEllipsoid>(&m)) return {{"kind", "triaxial"}, {"a", t->a}, {"b", t->b}, {"c", t->c}};
  const auto& p = std::get<ParametricSurface>(m);
  if (p.family == "conformal_sphere") return {{"kind", "parametric"}, {"family", p.family}, {"coefficients", p.coefficients}};
  if (p.family == "revolution_chart" && p.coefficients.size() == 2 && p.coefficients[1] == 1.0)
    return {{"kind", "parametric"}, {"family", "revolution_ellipsoid"}, {"epsilon", p.coefficients[0]}};
  throw std::invalid_argument("surface_to_json: custom parametric surfaces are not serialisable");
}

/// A surface entry is either an inline object or a path relative to base.
inline json resolve_surface(const json& entry, const std::filesystem::path& base) {
  if (entry.is_string()) {
    std::filesystem::path p = entry.get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p)) throw IoError("surface file not found: " + p.string());
    return read_json_file(p);
  }
  if (!entry.is_object()) throw std::invalid_argument("surface entry must be an object or a file path");
  return entry;
}

// ---- domains ------------------------------------------------------------------

/// {"surface": ..., "cap": {"theta0"} | {"r0"}, "mesh_h"?} or {"disk": {"radius"}}.
struct DomainSpec {
  json surface;  // resolved surface object, null for a flat disk
  double theta0 = NAN, r0 = NAN, disk_radius = NAN;
  double mesh_h = 0.0;  // mesh for D and d; 0 selects the default
};

inline DomainSpec domain_spec_from_json(const json& j, const std::filesystem::path& base = ".") {
  DomainSpec s;
  s.mesh_h = j.value("mesh_h", 0.0);
  if (j.contains("disk")) {
    s.disk_radius = j["disk"].at("radius").get<double>();
    return s;
  }
  s.surface = resolve_surface(j.at("surface"), base);
  const json& cap = j.at("cap");
  if (cap.contains("theta0")) s.theta0 = cap["theta0"].get<double>();
  else if (cap.contains("r0")) s.r0 = cap["r0"].get<double>();
  else throw std::invalid_argument("cap needs theta0 or r0");
  return s;
}

inline json domain_spec_to_json(const DomainSpec& s) {
  json j;
  if (!std::isnan(s.disk_radius)) j["disk"] = {{"radius", s.disk_radius}};
  else {
    j["surface"] = s.surface;
    j["cap"] = std::isnan(s.theta0) ? json{{"r0", s.r0}} : json{{"theta0", s.theta0}};
  }
  if (s.mesh_h > 0.0) j["mesh_h"] = s.mesh_h;
  return j;
}

inline GeodesicDomain build_domain(const DomainSpec& s) {
  if (!std::isnan(s.disk_radius)) return make_flat_disk(s.disk_radius, s.mesh_h);
  const Surface surface(surface_from_json(s.surface));
  if (!std::isnan(s.theta0)) return make_polar_cap(surface, s.theta0, s.mesh_h);
  return make_cap(surface, s.r0, s.mesh_h);
}

// ---- report objects -------------------------------------------------------------

inline json vec_json(const Eigen::Vector2d& p) { return json::array({p.x(), p.y()}); }

/// NaN and infinities become null.
inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json condition_report_json(const ConditionReport& r, bool samples = false) {
  json j{{"spec",
          {{"kind", to_string(r.spec.kind)},
           {"C", r.spec.C},
           {"lambda_lb", r.spec.lambda_lb},
           {"lambda_source", to_string(r.spec.lambda_source)}}},
         {"resolution", r.resolution},
         {"min_margin", r.min_margin},
         {"argmin", {r.argmin.u, r.argmin.v}},
         {"verdict", r.verdict},
         {"implied", r.implied}};
  if (r.spec.kind == ConditionKind::SpectralDominance) j["identity_residual"] = r.identity_residual;
  if (samples) {
    json s = json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) s.push_back({r.points[i].u, r.points[i].v, r.margins[i]});
    j["samples"] = std::move(s);
  }
  return j;
}

inline json domain_json(const GeodesicDomain& d) {
  return {{"surface", d.surface ? d.surface->kind() : std::string("plane")},
          {"r0", d.r0},
          {"polar_angle", num(d.polar_angle)},
          {"kg", d.kg},
          {"limiting_convex", d.limiting_convex},
          {"area", d.area},
          {"kappa_inf", d.kappa_inf},
          {"kappa_sup", d.kappa_sup},
          {"D", d.diameter.D},
          {"D_lower", d.diameter.lower},
          {"D_upper", d.diameter.upper},
          {"d", d.diameter.d},
          {"myers_bound", num(d.myers_bound)}};
}

inline json spectral_json(const SpectralSolution& s) {
  return {{"lambda", s.lambda},
          {"residuals", s.residuals},
          {"rayleigh_error", s.rayleigh_error},
          {"multiplicity_risk", s.multiplicity_risk},
          {"degenerate_23", s.degenerate_23},
          {"iterations", s.iterations},
          {"mesh_meta", {{"h", s.h}, {"vertices", s.vertex_count}, {"interior", s.interior_count}}}};
}

inline json concavity_report_json(const ConcavityReport& r, bool samples = false) {
  json j{{"C", r.C},
         {"tau_c", r.tau_c},
         {"delta", r.delta},
         {"h", r.h},
         {"points", r.points.size()},
         {"global_max", r.global_max},
         {"argmax", vec_json(r.argmax)},
         {"direction", vec_json(r.direction)},
         {"verdict", r.verdict},
         {"C_ge_minus_kappa_min", r.C_ge_minus_kappa_min},
         {"C_ge_minus_half_kappa", r.C_ge_minus_half_kappa},
         {"sphere_mode", r.sphere_mode}};
  if (r.sphere_mode) {
    j["hess_max"] = r.hess_max;
    j["hess_argmax"] = vec_json(r.hess_argmax);
    j["hess_direction"] = vec_json(r.hess_direction);
    j["wang_bound"] = r.wang_bound;
    j["wang_verdict"] = r.wang_verdict;
    j["wang_corrected_bound"] = r.wang_corrected_bound;
    j["wang_corrected_verdict"] = r.wang_corrected_verdict;
  }
  if (samples) {
    json s = json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) s.push_back({r.points[i].x(), r.points[i].y(), r.max_eig[i]});
    j["samples"] = std::move(s);
  }
  return j;
}

inline json barrier_report_json(const BarrierReport& r, bool samples = false) {
  json j{{"lambda1", r.lambda1},
         {"points", r.points.size()},
         {"min_margin", r.min_margin},
         {"argmin", vec_json(r.argmin)},
         {"ties", r.ties},
         {"verdict", r.verdict}};
  if (samples) {
    json s = json::array();
    for (const auto& p : r.points) s.push_back({p.p.x(), p.p.y(), p.margin});
    j["samples"] = std::move(s);
  }
  return j;
}

inline json gap_report_json(const GapReport& r) {
  json j{{"lambda1", r.lambda1},
         {"lambda2", r.lambda2},
         {"gap", r.gap},
         {"D", r.D},
         {"D_lower", r.D_lower},
         {"D_upper", r.D_upper},
         {"inf_kappa", r.inf_kappa},
         {"C", r.C},
         {"bound_curvature", r.bound_curvature},
         {"verdict_curvature", r.verdict_curvature},
         {"C_ge_minus_kappa_min", r.C_ge_minus_kappa_min},
         {"C_ge_minus_half_kappa", r.C_ge_minus_half_kappa},
         {"sphere_mode", r.sphere_mode}};
  if (r.sphere_mode) {
    j["bound_sphere"] = r.bound_sphere;
    j["verdict_sphere"] = r.verdict_sphere;
    j["bound_sphere_corrected"] = r.bound_sphere_corrected;
    j["verdict_sphere_corrected"] = r.verdict_sphere_corrected;
  }
  return j;
}

inline const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{"t",    "kappa_min",         "kappa_max",         "area",
                                             "harnack_floor_gap", "margin_closed_form", "margin_measured"};
  return cols;
}

inline std::vector<double> trace_values(const TraceRow& r) {
  return {r.t, r.kappa_min, r.kappa_max, r.area, r.harnack_floor_gap, r.margin_closed_form, r.margin_measured};
}

inline json trace_json(const DominanceTrace& tr) {
  json rows = json::array();
  for (const auto& r : tr.rows) {
    json row = json::array();
    for (double x : trace_values(r)) row.push_back(num(x));
    rows.push_back(std::move(row));
  }
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  return {{"alpha", tr.alpha},
          {"columns", trace_columns()},
          {"rows", std::move(rows)},
          {"first_positive_closed", opt(tr.first_positive_closed)},
          {"first_positive_measured", opt(tr.first_positive_measured)},
          {"first_positive_pointwise", opt(tr.first_positive_pointwise)},
          {"truncated_closed_form", tr.truncated_closed_form}};
}

// ---- CSV ------------------------------------------------------------------------

inline std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

inline std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream s;
  for (std::size_t i = 0; i < header.size(); ++i) s << (i ? "," : "") << header[i];
  s << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << csv_number(row[i]);
    s << "\n";
  }
  return s.str();
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  write_text_file(path, csv_text(header, rows));
}

inline std::string trace_csv(const DominanceTrace& tr) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : tr.rows) rows.push_back(trace_values(r));
  return csv_text(trace_columns(), rows);
}

// ---- GSVF nodal fields ------------------------------------------------------------
// 16-byte header: "GSVF", uint32 version, uint64 count; then count float64,
// all little-endian.

constexpr std::uint32_t kGsvfVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw IoError("GSVF: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_gsvf(const std::filesystem::path& path, const Eigen::VectorXd& values) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write("GSVF", 4);
  detail::put_le<std::uint32_t>(out, kGsvfVersion);
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) detail::put_le<double>(out, values(i));
}

inline Eigen::VectorXd read_gsvf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "GSVF", 4) != 0) throw IoError("GSVF: bad magic in " + path.string());
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kGsvfVersion) throw IoError("GSVF: unsupported version " + std::to_string(version));
  const auto count = detail::get_le<std::uint64_t>(in);
  Eigen::VectorXd v(static_cast<Eigen::Index>(count));
  for (std::uint64_t i = 0; i < count; ++i) v(static_cast<Eigen::Index>(i)) = detail::get_le<double>(in);
  return v;
}

// ---- mesh export ----------------------------------------------------------------

/// Node block: index, chart coordinates, embedded position, boundary flag.
/// Element block: index and three zero-based node indices.
inline std::string mesh_text(const TriMesh& m) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "# gapkit mesh, h " << m.h << "\n";
  s << "nodes " << m.vertex_count() << "\n";
  for (std::size_t i = 0; i < m.vertex_count(); ++i)
    s << i << " " << m.param[i].x() << " " << m.param[i].y() << " " << m.embedded[i].x() << " " << m.embedded[i].y()
      << " " << m.embedded[i].z() << " " << int(m.boundary[i]) << "\n";
  s << "elements " << m.triangles.size() << "\n";
  for (std::size_t i = 0; i < m.triangles.size(); ++i)
    s << i << " " << m.triangles[i][0] << " " << m.triangles[i][1] << " " << m.triangles[i][2] << "\n";
  return s.str();
}

struct MeshText {
  std::vector<Eigen::Vector2d> param;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> boundary;
};

inline MeshText parse_mesh_text(const std::string& text) {
  std::istringstream s(text);
  std::string line, word;
  MeshText out;
  while (std::getline(s, line) && (line.empty() || line[0] == '#')) {
  }
  std::size_t n = 0;
  std::istringstream(line) >> word >> n;
  if (word != "nodes") throw IoError("mesh: expected node block");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx;
    double u, v, x, y, z;
    int b;
    if (!(s >> idx >> u >> v >> x >> y >> z >> b)) throw IoError("mesh: truncated node block");
    out.param.emplace_back(u, v);
    out.boundary.push_back(static_cast<char>(b));
  }
  std::size_t m = 0;
  if (!(s >> word >> m) || word != "elements") throw IoError("mesh: expected element block");
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t idx;
    std::array<int, 3> t;
    if (!(s >> idx >> t[0] >> t[1] >> t[2])) throw IoError("mesh: truncated element block");
    out.triangles.push_back(t);
  }
  return out;
}

}  // namespace gapkit
