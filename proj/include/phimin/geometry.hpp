#pragma once

// Residuals of the graph equation
//   (1+u_x^2) u_yy + (1+u_y^2) u_xx - 2 u_x u_y u_xy = dphi(u) (1 + u_x^2 + u_y^2),
// curvature and pointwise identity checks on profile curves, and meshes.
//
// Sign convention: the unit normal of a profile curve with tangent angle theta
// is N = (-sin(theta) cos t, -sin(theta) sin t, cos(theta)), eta = <N, e3>, and
// the mean curvature is H = -(kappa + z'/x), so solutions satisfy H = -dphi eta.

#include "phimin/jet.hpp"
#include "phimin/profiles.hpp"
#include "phimin/reaper.hpp"
#include "phimin/rotational.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phimin {

double pde_residual(const GraphJet& j, const PhiProfile& p);
std::vector<double> pde_residual(const GraphFn& u, const PhiProfile& p,
                                 const std::vector<std::array<double, 2>>& points);

/// Uniform grid of graph values, value(i, j) at (x0 + i hx, y0 + j hy).
struct GraphGrid {
  double x0 = 0, y0 = 0, hx = 1, hy = 1;
  int nx = 0, ny = 0;
  std::vector<double> values;  // row-major in j
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

GraphGrid sample_grid(const GraphFn& u, double x0, double x1, double y0, double y1, int nx, int ny);

/// Fourth-order central differences; nodes within 2 of the boundary are rejected.
GraphJet grid_jet(const GraphGrid& g, int i, int j);
std::vector<double> pde_residual(const GraphGrid& g, const PhiProfile& p,
                                 const std::vector<std::array<int, 2>>& nodes);
/// sup of |residual| over all nodes at distance >= 2 from the boundary.
double grid_residual_sup(const GraphGrid& g, const PhiProfile& p);

enum class ThetaPrime { stored, divided_differences };

/// theta'(s) - dphi(z) cos(theta) + sin(theta)/x per sample (axis point skipped).
std::vector<double> curvature_residual(const RotationalCurve& c, const PhiProfile& p,
                                       ThetaPrime mode = ThetaPrime::stored);

struct IdentityReport {
  double e2_gap = 0;      // relative, pure algebra
  double eta_gap = 0;     // |(-H/dphi) - cos(theta)|: sign-convention check
  double e5_gap = 0;      // |Delta mu - dphi cos^2 theta|
  int e5_points = 0;
};

struct IdentityOptions {
  double x_lo = 0.0;  // e5 only on samples with x >= x_lo (keeps away from the axis)
  double x_hi = kInf;
};

IdentityReport identity_checks(const RotationalCurve& c, const PhiProfile& p,
                               const IdentityOptions& o = {});
IdentityReport identity_checks(const ReaperCurve& c, const PhiProfile& p,
                               const IdentityOptions& o = {});

struct SurfaceMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<double, 3>> normals;
  std::map<std::string, std::vector<double>> residuals;
};

SurfaceMesh revolve(const RotationalCurve& c, const PhiProfile& p, int n_theta);
/// Annulus from a catenoid pair: reversed left branch joined to the right branch.
SurfaceMesh revolve(const CatenoidPair& cat, const PhiProfile& p, int n_theta);

struct ExtrudeOptions {
  std::optional<double> theta;  // tilt angle
  double x_extent = 0;          // |x| range; 0 -> 0.99 of the admissible range
  int nx = 41, ny = 41;
};

SurfaceMesh extrude(const ReaperCurve& c, const PhiProfile& p, double y_lo, double y_hi,
                    const ExtrudeOptions& o = {});

int euler_characteristic(const SurfaceMesh& m);
bool orientation_consistent(const SurfaceMesh& m);
bool indices_valid(const SurfaceMesh& m);
double max_normal_defect(const SurfaceMesh& m);  // max | |n| - 1 |

}  // namespace phimin
