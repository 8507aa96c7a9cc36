#pragma once

// Rotational examples: profile curves s -> (x(s), z(s)) with tangent angle
// theta, revolved about the vertical axis. Bowls start on the axis, catenoid
// branches start at (x0, z0) with theta = 0 (right) or theta = pi (left).

#include "phimin/numerics/interp.hpp"
#include "phimin/profiles.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace phimin {

enum class RotKind { bowl, catenoid_right, catenoid_left };
std::string rot_kind_name(RotKind k);

struct RotSample {
  double s = 0, x = 0, z = 0, theta = 0;
  double kappa = 0;  // d theta / ds
  double slope = 0;  // tan theta
  double ddu = 0;    // u''(x) where the curve is a graph, NaN otherwise
  double v1 = 0;     // u'/dphi(u) - x, NaN where not a graph
};

struct Markers {
  std::optional<double> s_half;  // theta crosses pi/2 on the left branch
  std::optional<double> s_min;   // theta attains its minimum on the left branch
};

struct RotationalCurve {
  RotKind kind = RotKind::bowl;
  std::vector<RotSample> samples;
  double z0 = 0, x0 = 0;
  double omega_est = kInf;  // blow-up radius of the graph part, inf if none seen
  bool blown_up = false;
  Markers markers;
  std::string diagnostic;
  std::size_t graph_start = 0;  // samples from here on are a graph over x

  void finalize();
  double r_max() const { return samples.empty() ? 0 : samples.back().x; }
  double u_at(double r) const;
  double slope_at(double r) const;

 private:
  numerics::HermiteSpline u_spline_;  // quintic: u'' is stored on graph samples
};

struct RotationalOptions {
  double tol = 1e-10;
  double r_max = 30;
  double slope_cap = 1e8;  // |u'| beyond this counts as blow-up; inf disables
  double max_step = kInf;
};

RotationalCurve solve_bowl(const PhiProfile& p, double z0, double r_max, double tol = 1e-10);
RotationalCurve solve_bowl(const PhiProfile& p, double z0, const RotationalOptions& opts);

struct CatenoidPair {
  RotationalCurve right, left;
  double neck_min_x = 0;  // min of x over both branches
  double x0 = 0;
};

CatenoidPair solve_catenoid(const PhiProfile& p, double x0, double z0, double tol = 1e-10,
                            double r_max = 30);
CatenoidPair solve_catenoid(const PhiProfile& p, double x0, double z0, const RotationalOptions& opts);

/// Graph-form integration of the rotational equation from a regular point
/// (r0 > 0, u(r0) = z0, u'(r0) = slope0), stopping at r_max or when |u'| > stop_slope.
RotationalCurve solve_graph_ivp(const PhiProfile& p, double r0, double z0, double slope0,
                                double r_max, double stop_slope, double tol = 1e-10);

class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(const std::string& what, double witness)
      : std::invalid_argument(what), witness_(witness) {}
  double witness() const { return witness_; }

 private:
  double witness_;
};

struct CompareResult {
  bool dominates = false;
  double min_margin = 0;  // min of u1' - u2' over sampled r in ]0, r0]
  double r0 = 0;          // common maximal radius
  int points = 0;
};

CompareResult compare_profiles(const PhiProfile& p1, const PhiProfile& p2, double z0, double r_max,
                               double tol = 1e-10);

struct SlopeBoundResult {
  bool holds = false;
  double r_check = kInf;  // smallest sampled radius from which the bound holds to the end
};

SlopeBoundResult slope_lower_bound_check(const PhiProfile& p, const RotationalCurve& c, double alpha);

enum class OmegaClass { infinite, finite, undetermined };
std::string omega_name(OmegaClass k);

struct OmegaResult {
  OmegaClass kind = OmegaClass::undetermined;
  double radius = kInf;
};

OmegaResult classify_omega(const PhiProfile& p, const RotationalCurve& c);

}  // namespace phimin
