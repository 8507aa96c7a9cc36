#include "phimin/geometry.hpp"

#include "phimin/numerics/interp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace phimin {

double pde_residual(const GraphJet& j, const PhiProfile& p) {
  const double lhs = (1 + j.ux * j.ux) * j.uyy + (1 + j.uy * j.uy) * j.uxx - 2 * j.ux * j.uy * j.uxy;
  return lhs - p.dphi(j.u) * (1 + j.ux * j.ux + j.uy * j.uy);
}

std::vector<double> pde_residual(const GraphFn& u, const PhiProfile& p,
                                 const std::vector<std::array<double, 2>>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& q : points) out.push_back(pde_residual(u(q[0], q[1]), p));
  return out;
}

GraphGrid sample_grid(const GraphFn& u, double x0, double x1, double y0, double y1, int nx, int ny) {
  if (nx < 2 || ny < 2 || !(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("sample_grid: degenerate grid");
  GraphGrid g;
  g.x0 = x0;
  g.y0 = y0;
  g.nx = nx;
  g.ny = ny;
  g.hx = (x1 - x0) / (nx - 1);
  g.hy = (y1 - y0) / (ny - 1);
  g.values.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) g.values[static_cast<std::size_t>(j) * nx + i] = u(x0 + i * g.hx, y0 + j * g.hy).u;
  return g;
}

namespace {

constexpr double kD1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr double kD2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

}  // namespace

GraphJet grid_jet(const GraphGrid& g, int i, int j) {
  if (i < 2 || j < 2 || i > g.nx - 3 || j > g.ny - 3)
    throw std::out_of_range("grid_jet: node within two cells of the grid boundary");
  GraphJet r;
  r.u = g.at(i, j);
  for (int k = 0; k < 5; ++k) {
    const double fx = g.at(i + k - 2, j), fy = g.at(i, j + k - 2);
    r.ux += kD1[k] * fx;
    r.uy += kD1[k] * fy;
    r.uxx += kD2[k] * fx;
    r.uyy += kD2[k] * fy;
    for (int l = 0; l < 5; ++l) r.uxy += kD1[k] * kD1[l] * g.at(i + k - 2, j + l - 2);
  }
  r.ux /= g.hx;
  r.uy /= g.hy;
  r.uxx /= g.hx * g.hx;
  r.uyy /= g.hy * g.hy;
  r.uxy /= g.hx * g.hy;
  return r;
}

std::vector<double> pde_residual(const GraphGrid& g, const PhiProfile& p,
                                 const std::vector<std::array<int, 2>>& nodes) {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(pde_residual(grid_jet(g, n[0], n[1]), p));
  return out;
}

double grid_residual_sup(const GraphGrid& g, const PhiProfile& p) {
  double sup = 0;
  for (int j = 2; j <= g.ny - 3; ++j)
    for (int i = 2; i <= g.nx - 3; ++i) sup = std::max(sup, std::abs(pde_residual(grid_jet(g, i, j), p)));
  return sup;
}

namespace {

bool is_axis_point(const RotationalCurve& c, std::size_t k) {
  return c.kind == RotKind::bowl && k == 0 && c.samples[0].x == 0.0;
}

// Fornberg derivative of f over the five samples nearest to index k in s.
template <class F>
double local_derivative(const std::vector<RotSample>& s, std::size_t k, F f) {
  const std::size_t n = s.size();
  if (n < 5) throw std::invalid_argument("need at least five samples for divided differences");
  const std::size_t lo = std::min(k >= 2 ? k - 2 : 0, n - 5);
  std::vector<double> xs(5);
  for (int m = 0; m < 5; ++m) xs[m] = s[lo + m].s;
  const auto w = numerics::fd_weights(s[k].s, xs, 1);
  double d = 0;
  for (int m = 0; m < 5; ++m) d += w[m] * f(s[lo + m]);
  return d;
}

}  // namespace

std::vector<double> curvature_residual(const RotationalCurve& c, const PhiProfile& p, ThetaPrime mode) {
  std::vector<double> out;
  out.reserve(c.samples.size());
  for (std::size_t k = 0; k < c.samples.size(); ++k) {
    if (is_axis_point(c, k)) continue;
    const RotSample& q = c.samples[k];
    if (!(q.x > 0)) throw std::domain_error("curvature_residual: sample with x <= 0");
    const double tp = mode == ThetaPrime::stored
                          ? q.kappa
                          : local_derivative(c.samples, k, [](const RotSample& r) { return r.theta; });
    out.push_back(tp - p.dphi(q.z) * std::cos(q.theta) + std::sin(q.theta) / q.x);
  }
  return out;
}

namespace {

void e2_point(IdentityReport& r, double dphi, double H, double normal_eta) {
  const double eta = -H / dphi;
  const double grad2 = 1 - eta * eta;
  const double lhs = dphi * dphi, rhs = dphi * dphi * grad2 + H * H;
  r.e2_gap = std::max(r.e2_gap, std::abs(lhs - rhs) / std::max(1.0, lhs));
  r.eta_gap = std::max(r.eta_gap, std::abs(eta - normal_eta));
}

}  // namespace

IdentityReport identity_checks(const RotationalCurve& c, const PhiProfile& p, const IdentityOptions& o) {
  IdentityReport r;
  for (std::size_t k = 0; k < c.samples.size(); ++k) {
    if (is_axis_point(c, k)) continue;
    const RotSample& q = c.samples[k];
    const double dphi = p.dphi(q.z);
    const double H = -(q.kappa + std::sin(q.theta) / q.x);
    e2_point(r, dphi, H, std::cos(q.theta));
    if (q.x < o.x_lo || q.x > o.x_hi) continue;
    // Laplacian of the height on the surface of revolution: z'' + x' z' / x.
    const double zss = local_derivative(c.samples, k, [](const RotSample& s) { return std::sin(s.theta); });
    const double lap = zss + std::cos(q.theta) * std::sin(q.theta) / q.x;
    const double cs = std::cos(q.theta);
    r.e5_gap = std::max(r.e5_gap, std::abs(lap - dphi * cs * cs));
    ++r.e5_points;
  }
  return r;
}

IdentityReport identity_checks(const ReaperCurve& c, const PhiProfile& p, const IdentityOptions& o) {
  IdentityReport r;
  const auto& s = c.samples;
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double h = std::hypot(1.0, s[k].du);
    const double cv = 1 / h;
    const double dphi = p.dphi(s[k].u);
    const double kappa = dphi * (1 + s[k].du * s[k].du) / (h * h * h);
    e2_point(r, dphi, -kappa, cv);
    if (s[k].x < o.x_lo || s[k].x > o.x_hi || n < 5) continue;
    // Translation-invariant surface: Delta mu = d/ds sin v with d/ds = cos v d/dx.
    const std::size_t lo = std::min(k >= 2 ? k - 2 : 0, n - 5);
    std::vector<double> xs(5);
    for (int m = 0; m < 5; ++m) xs[m] = s[lo + m].x;
    const auto w = numerics::fd_weights(s[k].x, xs, 1);
    double d = 0;
    for (int m = 0; m < 5; ++m) d += w[m] * s[lo + m].du / std::hypot(1.0, s[lo + m].du);
    r.e5_gap = std::max(r.e5_gap, std::abs(cv * d - dphi * cv * cv));
    ++r.e5_points;
  }
  return r;
}

namespace {

struct ProfilePoint {
  double x, z, theta, kappa;
};

void add_revolution(SurfaceMesh& m, const std::vector<ProfilePoint>& pts, const PhiProfile& p, int n_theta,
                    bool apex) {
  if (n_theta < 3) throw std::invalid_argument("revolve: need at least three angular samples");
  if (pts.size() < 2) throw std::invalid_argument("revolve: need at least two profile samples");
  auto& h_res = m.residuals["mean_curvature"];
  auto& c_res = m.residuals["curvature_residual"];
  auto push_vertex = [&](const ProfilePoint& q, double t) {
    m.vertices.push_back({q.x * std::cos(t), q.x * std::sin(t), q.z});
    m.normals.push_back({-std::sin(q.theta) * std::cos(t), -std::sin(q.theta) * std::sin(t), std::cos(q.theta)});
    if (q.x > 0) {
      h_res.push_back(-(q.kappa + std::sin(q.theta) / q.x));
      c_res.push_back(q.kappa - p.dphi(q.z) * std::cos(q.theta) + std::sin(q.theta) / q.x);
    } else {
      // On the axis z'/x -> kappa, so H = -2 kappa and theta' = dphi / 2.
      h_res.push_back(-2 * q.kappa);
      c_res.push_back(q.kappa - 0.5 * p.dphi(q.z));
    }
  };
  const auto ring = [&](std::size_t k, int j) { return static_cast<int>((apex ? 1 : 0) + (k - (apex ? 1 : 0)) * n_theta + j); };
  std::size_t first = 0;
  if (apex) {
    push_vertex(pts[0], 0.0);
    first = 1;
  }
  for (std::size_t k = first; k < pts.size(); ++k)
    for (int j = 0; j < n_theta; ++j) push_vertex(pts[k], 2 * M_PI * j / n_theta);
  if (apex)
    for (int j = 0; j < n_theta; ++j) m.faces.push_back({0, ring(1, (j + 1) % n_theta), ring(1, j)});
  for (std::size_t k = first; k + 1 < pts.size(); ++k)
    for (int j = 0; j < n_theta; ++j) {
      const int jn = (j + 1) % n_theta;
      const int a = ring(k, j), b = ring(k + 1, j), c = ring(k + 1, jn), d = ring(k, jn);
      m.faces.push_back({a, d, c});
      m.faces.push_back({a, c, b});
    }
}

}  // namespace

SurfaceMesh revolve(const RotationalCurve& c, const PhiProfile& p, int n_theta) {
  std::vector<ProfilePoint> pts;
  for (const auto& q : c.samples) pts.push_back({q.x, q.z, q.theta, q.kappa});
  SurfaceMesh m;
  add_revolution(m, pts, p, n_theta, !c.samples.empty() && c.samples[0].x == 0.0);
  return m;
}

SurfaceMesh revolve(const CatenoidPair& cat, const PhiProfile& p, int n_theta) {
  // Traversing the left branch backwards turns its tangent by pi; kappa is unchanged.
  std::vector<ProfilePoint> pts;
  const auto& L = cat.left.samples;
  for (std::size_t k = L.size(); k-- > 1;) pts.push_back({L[k].x, L[k].z, L[k].theta - M_PI, L[k].kappa});
  for (const auto& q : cat.right.samples) pts.push_back({q.x, q.z, q.theta, q.kappa});
  SurfaceMesh m;
  add_revolution(m, pts, p, n_theta, false);
  return m;
}

SurfaceMesh extrude(const ReaperCurve& c, const PhiProfile& p, double y_lo, double y_hi, const ExtrudeOptions& o) {
  if (c.samples.size() < 2) throw std::invalid_argument("extrude: empty curve");
  if (!(y_hi > y_lo) || o.nx < 2 || o.ny < 2) throw std::invalid_argument("extrude: degenerate grid");
  std::optional<TiltedReaper> tilted;
  double limit = std::min(c.x_max(), c.lambda_est);
  if (o.theta) {
    tilted.emplace(c, p, *o.theta);
    limit = std::min(c.x_max(), tilted->base().lambda_est) / std::cos(*o.theta);
  }
  const double ext = o.x_extent > 0 ? o.x_extent : 0.99 * limit;
  if (!(ext < limit)) throw std::out_of_range("extrude: x extent beyond the solved range");
  const GraphFn jet = [&](double x, double y) {
    if (tilted) return tilted->jet(x, y);
    GraphJet j;
    j.u = c.u_at(x);
    j.ux = c.du_at(x);
    j.uxx = c.ddu_at(x);
    return j;
  };
  SurfaceMesh m;
  auto& res = m.residuals["pde_residual"];
  for (int jy = 0; jy < o.ny; ++jy)
    for (int ix = 0; ix < o.nx; ++ix) {
      const double x = -ext + 2 * ext * ix / (o.nx - 1);
      const double y = y_lo + (y_hi - y_lo) * jy / (o.ny - 1);
      const GraphJet j = jet(x, y);
      const double h = std::sqrt(1 + j.ux * j.ux + j.uy * j.uy);
      m.vertices.push_back({x, y, j.u});
      m.normals.push_back({-j.ux / h, -j.uy / h, 1 / h});
      res.push_back(pde_residual(j, p));
    }
  for (int jy = 0; jy + 1 < o.ny; ++jy)
    for (int ix = 0; ix + 1 < o.nx; ++ix) {
      const int a = jy * o.nx + ix, b = a + 1, cc = a + o.nx + 1, d = a + o.nx;
      m.faces.push_back({a, b, cc});
      m.faces.push_back({a, cc, d});
    }
  return m;
}

int euler_characteristic(const SurfaceMesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& f : m.faces)
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(f[k], f[(k + 1) % 3]));
  return static_cast<int>(m.vertices.size()) - static_cast<int>(edges.size()) + static_cast<int>(m.faces.size());
}

bool orientation_consistent(const SurfaceMesh& m) {
  // Each directed edge may occur once; a consistently oriented shared edge
  // appears once in each direction.
  std::set<std::pair<int, int>> directed;
  for (const auto& f : m.faces)
    for (int k = 0; k < 3; ++k)
      if (!directed.insert({f[k], f[(k + 1) % 3]}).second) return false;
  return true;
}

bool indices_valid(const SurfaceMesh& m) {
  const int n = static_cast<int>(m.vertices.size());
  for (const auto& f : m.faces) {
    for (int v : f)
      if (v < 0 || v >= n) return false;
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) return false;
  }
  return m.normals.size() == m.vertices.size();
}

double max_normal_defect(const SurfaceMesh& m) {
  double d = 0;
  for (const auto& n : m.normals) d = std::max(d, std::abs(std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) - 1));
  return d;
}

}  // namespace phimin
