#pragma once
// Geodesic caps, their convexity certificate, structured polar meshes, and
// mesh-based geodesic diameter estimates.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gapkit/quadrature.hpp"
#include "gapkit/radial_profile.hpp"
#include "gapkit/surface.hpp"

namespace gapkit {

using MetricFn = std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>;

struct TriMesh {
  std::vector<Eigen::Vector2d> param;     // geodesic normal coordinates
  std::vector<Eigen::Vector3d> embedded;  // position in R^3
  std::vector<std::array<int, 3>> triangles;
  std::vector<Eigen::Matrix2d> metric;    // per vertex
  std::vector<char> boundary;
  double h = 0.0;  // longest edge in the metric
  int rings = 0;

  std::size_t vertex_count() const { return param.size(); }
  std::size_t interior_count() const {
    return static_cast<std::size_t>(std::count(boundary.begin(), boundary.end(), 0));
  }
};

struct DiameterBracket {
  double D = 0.0, lower = 0.0, upper = 0.0;
  double d = 0.0;  // inscribed-ball diameter
  int sources = 0;
};

struct GeodesicDomain {
  std::optional<Surface> surface;  // empty for the Euclidean plane
  RadialProfile profile;
  double r0 = 0.0;
  double polar_angle = std::numeric_limits<double>::quiet_NaN();  // sphere caps only
  double kg = 0.0;                 // boundary geodesic curvature f'(r0)/f(r0)
  bool limiting_convex = false;    // totally geodesic boundary admitted as a closure case
  double area = 0.0;
  double kappa_inf = 0.0, kappa_sup = 0.0;
  DiameterBracket diameter;
  double myers_bound = std::numeric_limits<double>::infinity();

  Eigen::Matrix2d metric(const Eigen::Vector2d& p) const { return cap_metric_matrix(profile, p); }
  MetricFn metric_fn() const {
    const RadialProfile rp = profile;
    return [rp](const Eigen::Vector2d& p) { return cap_metric_matrix(rp, p); };
  }
  bool contains(const Eigen::Vector2d& p) const { return p.norm() <= r0 * (1.0 + 1e-12); }
};

struct DomainRejected : std::runtime_error {
  double kg;
  DomainRejected(const std::string& what, double k) : std::runtime_error(what), kg(k) {}
};

// ---- metric lengths and shortest paths -----------------------------------

/// Length of the parameter-space segment a-b, Simpson's rule on the metric norm.
inline double metric_length(const MetricFn& g, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d d = b - a;
  auto norm = [&](const Eigen::Vector2d& p) { return std::sqrt(std::max(0.0, d.dot(g(p) * d))); };
  return (norm(a) + 4.0 * norm(0.5 * (a + b)) + norm(b)) / 6.0;
}

struct MeshGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
};

inline std::vector<std::pair<int, int>> mesh_edges(const TriMesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) edges.emplace_back(std::minmax(t[e], t[(e + 1) % 3]));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

inline MeshGraph mesh_graph(const TriMesh& mesh, const MetricFn& g) {
  MeshGraph graph;
  graph.adj.resize(mesh.vertex_count());
  for (const auto& [a, b] : mesh_edges(mesh)) {
    const double w = metric_length(g, mesh.param[a], mesh.param[b]);
    graph.adj[a].push_back({b, w});
    graph.adj[b].push_back({a, w});
  }
  return graph;
}

inline std::vector<double> dijkstra(const MeshGraph& graph, const std::vector<int>& sources,
                                    std::vector<int>* pred = nullptr) {
  const std::size_t n = graph.adj.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  if (pred) pred->assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (int s : sources) {
    dist[s] = 0.0;
    pq.push({0.0, s});
  }
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (const auto& [w, len] : graph.adj[v])
      if (d + len < dist[w]) {
        dist[w] = d + len;
        if (pred) (*pred)[w] = v;
        pq.push({dist[w], w});
      }
  }
  for (double d : dist)
    if (!std::isfinite(d)) throw std::runtime_error("mesh graph is disconnected");
  return dist;
}

namespace detail {

inline double path_length(const MetricFn& g, const std::vector<Eigen::Vector2d>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += metric_length(g, pts[i], pts[i + 1]);
  return s;
}

inline double path_energy(const MetricFn& g, const std::vector<Eigen::Vector2d>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double l = metric_length(g, pts[i], pts[i + 1]);
    s += l * l;
  }
  return s;
}

/// Relaxes the interior points of a polyline towards a discrete geodesic by
/// damped Newton on the path energy sum l(X_i, X_i+1)^2, whose minimisers are
/// evenly spaced along the geodesic. Segment derivatives come from central
/// differences; the Hessian is block tridiagonal.
inline void relax_path(const MetricFn& g, std::vector<Eigen::Vector2d>& pts, double r_bound, int max_iter) {
  const int n = static_cast<int>(pts.size()) - 1;
  if (n < 2) return;
  const int dim = 2 * (n - 1);
  double E = path_energy(g, pts);
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i) {
      Eigen::Vector4d z;
      z << pts[i], pts[i + 1];
      auto e = [&](const Eigen::Vector4d& w) {
        const double l = metric_length(g, w.head<2>(), w.tail<2>());
        return l * l;
      };
      const double dl = 1e-4 * std::max((pts[i + 1] - pts[i]).norm(), 1e-12);
      const double e0 = e(z);
      Eigen::Vector4d gz;
      Eigen::Matrix4d hz;
      std::array<double, 4> fp{}, fm{};
      for (int k = 0; k < 4; ++k) {
        Eigen::Vector4d zp = z, zm = z;
        zp(k) += dl, zm(k) -= dl;
        fp[k] = e(zp), fm[k] = e(zm);
        gz(k) = (fp[k] - fm[k]) / (2 * dl);
        hz(k, k) = (fp[k] - 2 * e0 + fm[k]) / (dl * dl);
      }
      for (int k = 0; k < 4; ++k)
        for (int l = k + 1; l < 4; ++l) {
          Eigen::Vector4d a = z, b = z, c = z, d = z;
          a(k) += dl, a(l) += dl;
          b(k) += dl, b(l) -= dl;
          c(k) -= dl, c(l) += dl;
          d(k) -= dl, d(l) -= dl;
          hz(k, l) = hz(l, k) = (e(a) - e(b) - e(c) + e(d)) / (4 * dl * dl);
        }
      // unknown index of local coordinate k, or -1 for fixed endpoints
      auto idx = [&](int k) {
        const int v = i + k / 2;
        return (v == 0 || v == n) ? -1 : 2 * (v - 1) + k % 2;
      };
      for (int k = 0; k < 4; ++k) {
        const int rk = idx(k);
        if (rk < 0) continue;
        grad(rk) += gz(k);
        for (int l = 0; l < 4; ++l)
          if (const int cl = idx(l); cl >= 0) trip.emplace_back(rk, cl, hz(k, l));
      }
    }
    Eigen::SparseMatrix<double> H(dim, dim);
    H.setFromTriplets(trip.begin(), trip.end());
    double mu = 0.0;
    Eigen::VectorXd step;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::SparseMatrix<double> Hr = H;
      if (mu > 0.0)
        for (int k = 0; k < dim; ++k) Hr.coeffRef(k, k) += mu;
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hr);
      if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
        step = -ldlt.solve(grad);
        break;
      }
      mu = mu == 0.0 ? 1e-8 * H.diagonal().cwiseAbs().maxCoeff() : mu * 100.0;
    }
    if (step.size() != dim || !step.allFinite()) return;
    bool accepted = false;
    double moved = 0.0;
    for (double t = 1.0; t > 1e-4; t *= 0.5) {
      std::vector<Eigen::Vector2d> trial = pts;
      for (int v = 1; v < n; ++v) {
        trial[v] += t * step.segment<2>(2 * (v - 1));
        if (trial[v].norm() > r_bound) trial[v] *= r_bound / trial[v].norm();
      }
      const double Et = path_energy(g, trial);
      if (Et <= E) {
        for (int v = 1; v < n; ++v) moved = std::max(moved, (trial[v] - pts[v]).norm());
        accepted = Et < E;
        pts.swap(trial);
        E = Et;
        break;
      }
    }
    if (!accepted || moved < 1e-13 * (pts.back() - pts.front()).norm() + 1e-300) return;
  }
}

inline double longest_segment(const MetricFn& g, const std::vector<Eigen::Vector2d>& pts) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) m = std::max(m, metric_length(g, pts[i], pts[i + 1]));
  return m;
}

inline std::vector<Eigen::Vector2d> resample(const MetricFn& g, const std::vector<Eigen::Vector2d>& path, int n) {
  std::vector<double> cum{0.0};
  for (std::size_t i = 0; i + 1 < path.size(); ++i) cum.push_back(cum.back() + metric_length(g, path[i], path[i + 1]));
  const double total = cum.back();
  std::vector<Eigen::Vector2d> pts{path.front()};
  std::size_t j = 0;
  for (int k = 1; k < n; ++k) {
    const double s = total * k / n;
    while (j + 2 < cum.size() && cum[j + 1] < s) ++j;
    const double t = std::clamp((s - cum[j]) / std::max(cum[j + 1] - cum[j], 1e-300), 0.0, 1.0);
    pts.push_back(path[j] + t * (path[j + 1] - path[j]));
  }
  pts.push_back(path.back());
  return pts;
}

/// Doubles the point count until every segment is at most target, relaxing at each level.
inline std::vector<Eigen::Vector2d> refine_path(const MetricFn& g, std::vector<Eigen::Vector2d> pts, double r_bound,
                                                double target) {
  for (int level = 0; level < 20; ++level) {
    relax_path(g, pts, r_bound, 50);
    if (longest_segment(g, pts) <= target) break;
    std::vector<Eigen::Vector2d> finer{pts.front()};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      finer.push_back(0.5 * (pts[i] + pts[i + 1]));
      finer.push_back(pts[i + 1]);
    }
    pts.swap(finer);
  }
  return pts;
}

/// Coarse-to-fine straightening of a mesh path; returns the relaxed polyline.
inline std::vector<Eigen::Vector2d> straighten(const MetricFn& g, const std::vector<Eigen::Vector2d>& path,
                                               double r_bound, double target_segment) {
  if (path.size() < 2) return path;
  return refine_path(g, resample(g, path, 8), r_bound, target_segment);
}

/// Moves the endpoints of a relaxed path, blending the displacement linearly
/// along it, and relaxes again.
inline std::vector<Eigen::Vector2d> move_ends(const MetricFn& g, std::vector<Eigen::Vector2d> pts,
                                              const Eigen::Vector2d& a, const Eigen::Vector2d& b, double r_bound) {
  const Eigen::Vector2d da = a - pts.front(), db = b - pts.back();
  const double n = static_cast<double>(pts.size() - 1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = i / n;
    pts[i] += (1.0 - t) * da + t * db;
    if (pts[i].norm() > r_bound) pts[i] *= r_bound / pts[i].norm();
  }
  pts.front() = a, pts.back() = b;
  relax_path(g, pts, r_bound, 50);
  return pts;
}

inline std::vector<Eigen::Vector2d> trace_path(const TriMesh& mesh, const std::vector<int>& pred, int to) {
  std::vector<Eigen::Vector2d> path;
  for (int v = to; v >= 0; v = pred[v]) path.push_back(mesh.param[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

// ---- meshing --------------------------------------------------------------

/// Structured polar mesh: N rings with 6i vertices on ring i and a triangle fan
/// at the centre. Boundary vertices lie exactly on |p| = r0.
inline TriMesh polar_mesh(const RadialProfile& profile, double r0, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("triangulate: h must be positive");
  if (!(h < r0 / 4.0)) throw std::invalid_argument("triangulate: h too coarse for the domain (needs h < inradius/4)");
  const int N = static_cast<int>(std::ceil(r0 / (h * std::sqrt(3.0) / 2.0)));
  TriMesh m;
  m.rings = N;
  auto add = [&](double r, double th, bool bnd) {
    const Eigen::Vector2d p(r * std::cos(th), r * std::sin(th));
    m.param.push_back(p);
    m.embedded.push_back(profile.embed(r, th));
    m.metric.push_back(cap_metric_matrix(profile, p));
    m.boundary.push_back(bnd ? 1 : 0);
  };
  add(0.0, 0.0, false);
  for (int i = 1; i <= N; ++i) {
    const double r = (i == N) ? r0 : r0 * i / N;
    for (int j = 0; j < 6 * i; ++j) add(r, 2.0 * std::numbers::pi * j / (6 * i), i == N);
  }
  auto start = [](int i) { return i == 0 ? 0 : 1 + 3 * i * (i - 1); };
  for (int j = 0; j < 6; ++j) m.triangles.push_back({0, start(1) + j, start(1) + (j + 1) % 6});
  for (int i = 2; i <= N; ++i) {
    const int mi = 6 * (i - 1), no = 6 * i;
    const int si = start(i - 1), so = start(i);
    int k = 0, j = 0;
    while (k < mi || j < no) {
      const double a_next = static_cast<double>(k + 1) / mi;
      const double b_next = static_cast<double>(j + 1) / no;
      if (j < no && (k == mi || b_next <= a_next)) {
        m.triangles.push_back({si + k % mi, so + j, so + (j + 1) % no});
        ++j;
      } else {
        m.triangles.push_back({si + k, so + j % no, si + (k + 1) % mi});
        ++k;
      }
    }
  }
  for (const auto& t : m.triangles) {
    const Eigen::Vector2d e1 = m.param[t[1]] - m.param[t[0]], e2 = m.param[t[2]] - m.param[t[0]];
    if (!(e1.x() * e2.y() - e1.y() * e2.x() > 0.0)) throw std::logic_error("polar_mesh: inverted triangle");
  }
  const MetricFn g = [profile](const Eigen::Vector2d& p) { return cap_metric_matrix(profile, p); };
  for (const auto& [a, b] : mesh_edges(m)) m.h = std::max(m.h, metric_length(g, m.param[a], m.param[b]));
  return m;
}

inline TriMesh triangulate(const GeodesicDomain& dom, double h) { return polar_mesh(dom.profile, dom.r0, h); }

/// Flat rectangle [0, w] x [0, ht] split into right triangles.
inline TriMesh rectangle_mesh(double w, double ht, double h) {
  if (!(h > 0.0) || !(h < std::min(w, ht) / 4.0)) throw std::invalid_argument("rectangle_mesh: bad h");
  const int nx = static_cast<int>(std::ceil(w / h)), ny = static_cast<int>(std::ceil(ht / h));
  TriMesh m;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const Eigen::Vector2d p(w * i / nx, ht * j / ny);
      m.param.push_back(p);
      m.embedded.push_back({p.x(), p.y(), 0.0});
      m.metric.push_back(Eigen::Matrix2d::Identity());
      m.boundary.push_back(i == 0 || j == 0 || i == nx || j == ny);
    }
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  m.h = std::sqrt(std::pow(w / nx, 2) + std::pow(ht / ny, 2));
  return m;
}

/// Metric-weighted triangle areas with the vertex-averaged metric.
inline double mesh_area(const TriMesh& m) {
  double s = 0.0;
  for (const auto& t : m.triangles) {
    const Eigen::Vector2d e1 = m.param[t[1]] - m.param[t[0]], e2 = m.param[t[2]] - m.param[t[0]];
    const Eigen::Matrix2d g = (m.metric[t[0]] + m.metric[t[1]] + m.metric[t[2]]) / 3.0;
    s += 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x()) * std::sqrt(g.determinant());
  }
  return s;
}

// ---- diameters ------------------------------------------------------------

/// Intrinsic diameter D with bracket and inscribed-ball diameter d from a mesh.
/// sources = number of boundary vertices used as Dijkstra sources (0 = all).
inline DiameterBracket geodesic_diameter(const GeodesicDomain& dom, const TriMesh& mesh, int sources = 0) {
  const MetricFn g = dom.metric_fn();
  const MeshGraph graph = mesh_graph(mesh, g);
  std::vector<int> bnd;
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i)
    if (mesh.boundary[i]) bnd.push_back(static_cast<int>(i));
  if (bnd.empty()) throw std::invalid_argument("geodesic_diameter: mesh has no boundary");
  const int nb = static_cast<int>(bnd.size());
  const int ns = (sources <= 0 || sources > nb) ? nb : sources;
  std::vector<int> src;
  for (int k = 0; k < ns; ++k) src.push_back(bnd[static_cast<std::size_t>(k) * nb / ns]);

  struct Pair {
    double dist;
    int s, t;
    std::vector<int> pred;
  };
  std::vector<Pair> best;
  for (int s : src) {
    std::vector<int> pred;
    const auto dist = dijkstra(graph, {s}, &pred);
    int far = bnd.front();
    for (int b : bnd)
      if (dist[b] > dist[far]) far = b;
    best.push_back({dist[far], s, far, std::move(pred)});
    std::sort(best.begin(), best.end(), [](const Pair& a, const Pair& b) { return a.dist > b.dist; });
    if (best.size() > 4) best.pop_back();
  }
  const double target = 0.5 * mesh.h;
  DiameterBracket out;
  out.sources = ns;
  double seg_max = 0.0;
  const double r0 = dom.r0;
  auto on_circle = [r0](double ang) { return Eigen::Vector2d(r0 * std::cos(ang), r0 * std::sin(ang)); };
  for (const auto& p : best) {
    // coarse geodesic, then pattern-search both endpoint angles along the boundary
    auto pts = detail::resample(g, detail::trace_path(mesh, p.pred, p.t), 32);
    detail::relax_path(g, pts, r0, 50);
    double aa = std::atan2(pts.front().y(), pts.front().x()), ab = std::atan2(pts.back().y(), pts.back().x());
    double L = detail::path_length(g, pts);
    for (double step = 2.0 * mesh.h / r0; step > 1e-7;) {
      bool improved = false;
      for (const auto& [sa, sb] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        const double na = aa + sa * step, nb = ab + sb * step;
        auto trial = detail::move_ends(g, pts, on_circle(na), on_circle(nb), r0);
        const double Lt = detail::path_length(g, trial);
        if (Lt > L) {
          L = Lt, aa = na, ab = nb, pts = std::move(trial);
          improved = true;
          break;
        }
      }
      if (!improved) step *= 0.5;
    }
    pts = detail::refine_path(g, pts, r0, target);
    L = detail::path_length(g, pts);
    if (L > out.D) {
      out.D = L;
      seg_max = detail::longest_segment(g, pts);
    }
  }
  // spacing of sources along the boundary
  double gap = 0.0;
  for (int k = 0; k < ns; ++k) {
    const std::size_t i0 = static_cast<std::size_t>(k) * nb / ns, i1 = static_cast<std::size_t>(k + 1) * nb / ns;
    double s = 0.0;
    for (std::size_t i = i0; i < i1; ++i) s += metric_length(g, mesh.param[bnd[i]], mesh.param[bnd[(i + 1) % nb]]);
    gap = std::max(gap, s);
  }
  const double curv = std::max(dom.kappa_sup, 1.0 / (dom.r0 * dom.r0));
  out.lower = out.D * (1.0 - seg_max * seg_max * curv);
  out.upper = out.D + gap;

  // inscribed ball: farthest interior vertex from the boundary
  std::vector<int> pred;
  const auto dist = dijkstra(graph, bnd, &pred);
  std::vector<int> order;
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i)
    if (!mesh.boundary[i]) order.push_back(static_cast<int>(i));
  if (order.empty()) throw std::invalid_argument("geodesic_diameter: no interior vertex");
  std::partial_sort(order.begin(), order.begin() + std::min<std::size_t>(3, order.size()), order.end(),
                    [&](int a, int b) { return dist[a] > dist[b]; });
  double rin = 0.0;
  for (std::size_t k = 0; k < std::min<std::size_t>(3, order.size()); ++k) {
    auto path = detail::trace_path(mesh, pred, order[k]);
    std::reverse(path.begin(), path.end());  // vertex -> boundary
    const auto pts = detail::straighten(g, path, dom.r0, target);
    rin = std::max(rin, detail::path_length(g, pts));
  }
  out.d = 2.0 * rin;
  return out;
}

// ---- caps -----------------------------------------------------------------

namespace detail {

inline void fill_cap_geometry(GeodesicDomain& dom, double mesh_h) {
  const RadialProfile& rp = dom.profile;
  const QuadratureRule q = gauss_legendre(64, 0.0, dom.r0);
  dom.area = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) dom.area += 2.0 * std::numbers::pi * q.weights[i] * rp.f(q.nodes[i]);
  dom.kappa_inf = INFINITY, dom.kappa_sup = -INFINITY;
  for (int i = 0; i <= 1024; ++i) {
    const double k = rp.kappa(dom.r0 * i / 1024);
    dom.kappa_inf = std::min(dom.kappa_inf, k);
    dom.kappa_sup = std::max(dom.kappa_sup, k);
  }
  const double h = mesh_h > 0.0 ? mesh_h : dom.r0 / 24.0;
  dom.diameter = geodesic_diameter(dom, triangulate(dom, h));
}

}  // namespace detail

/// Geodesic ball of radius r0 about the pole of a sphere or of the x_lo pole of
/// a surface of revolution. mesh_h sets the mesh used for D and d (0 = r0/24).
inline GeodesicDomain make_cap(const Surface& surface, double r0, double mesh_h = 0.0) {
  GeodesicDomain dom;
  if (const auto* s = std::get_if<RoundSphere>(&surface.model())) {
    dom.profile = RadialProfile::sphere(s->radius);
    dom.polar_angle = r0 / s->radius;
  } else if (const auto* rev = std::get_if<SurfaceOfRevolution>(&surface.model())) {
    dom.profile = RadialProfile::revolution(rev->profile);
  } else {
    throw std::invalid_argument("make_cap: caps are defined on spheres and surfaces of revolution");
  }
  if (!(r0 > 0.0) || !(r0 < dom.profile.r_max()))
    throw std::invalid_argument("make_cap: r0 must lie inside the profile domain");
  dom.surface = surface;
  dom.r0 = r0;
  const double fp = dom.profile.df(r0);
  dom.kg = fp / dom.profile.f(r0);
  dom.myers_bound = std::numbers::pi / std::sqrt(surface.kappa_min());
  if (std::abs(fp) <= 1e-12) {
    dom.limiting_convex = true;
  } else if (fp < 0.0) {
    throw DomainRejected("make_cap: cap is not convex (boundary geodesic curvature " + std::to_string(dom.kg) + ")",
                         dom.kg);
  }
  detail::fill_cap_geometry(dom, mesh_h);
  return dom;
}

/// Cap of polar angle theta0 about the pole of a round sphere.
inline GeodesicDomain make_polar_cap(const Surface& surface, double theta0, double mesh_h = 0.0) {
  const auto* s = std::get_if<RoundSphere>(&surface.model());
  if (!s) throw std::invalid_argument("make_polar_cap: surface is not a round sphere");
  return make_cap(surface, theta0 * s->radius, mesh_h);
}

/// Euclidean disk of the given radius.
inline GeodesicDomain make_flat_disk(double radius, double mesh_h = 0.0) {
  if (!(radius > 0.0)) throw std::invalid_argument("make_flat_disk: radius must be positive");
  GeodesicDomain dom;
  dom.profile = RadialProfile::flat();
  dom.r0 = radius;
  dom.kg = 1.0 / radius;
  detail::fill_cap_geometry(dom, mesh_h);
  return dom;
}

}  // namespace gapkit
