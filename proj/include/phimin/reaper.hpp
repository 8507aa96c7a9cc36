#pragma once

// Translation-invariant solutions u(x) of u'' = dphi(u) (1 + u'^2), u(0) = u0,
// u'(0) = 0, extruded in y (grim reapers), plus their tilted versions.

#include "phimin/jet.hpp"
#include "phimin/numerics/interp.hpp"
#include "phimin/profiles.hpp"

#include <string>
#include <vector>

namespace phimin {

enum class Endpoint {
  vertical_asymptotes,
  finite_slope_infinite_height,
  entire,
  reaches_domain_edge,
  truncated
};

std::string endpoint_name(Endpoint e);

struct ReaperSample {
  double x = 0, u = 0, du = 0;
};

struct ReaperCurve {
  double u0 = 0;
  std::vector<ReaperSample> samples;  // x >= 0, increasing
  double lambda_est = kInf;
  Endpoint endpoint = Endpoint::truncated;
  double conserved_ref = 1;  // e^{phi(u0)}
  std::string diagnostic;

  /// Builds the interpolants; needs the profile for u'' on the samples.
  void finalize(const PhiProfile& p);
  double x_max() const { return samples.empty() ? 0.0 : samples.back().x; }
  double u_at(double x) const;    // even extension
  double du_at(double x) const;   // odd extension
  double ddu_at(double x) const;  // from the ODE at the interpolated state

 private:
  numerics::HermiteSpline u_spline_;
  RealFn dphi_;
};

ReaperCurve solve_reaper_ivp(const PhiProfile& p, double u0, double x_max, double tol = 1e-10);

/// Curve from x = X(phi(u)) evaluated at the given heights z > phi(u0).
ReaperCurve reaper_quadrature(const PhiProfile& p, double u0, const std::vector<double>& z_grid,
                              double tol = 1e-10);

/// Half-width of the maximal existence interval; +inf when unbounded.
double lambda_estimate(const PhiProfile& p, double u0, double tol = 1e-10);

struct FinitenessReport {
  bool finite = false;
  int trend_in_u0 = 0;  // -1 nonincreasing, +1 nondecreasing, 0 unknown
  int windows = 0;
};

FinitenessReport lambda_finiteness(const PhiProfile& p, double u0);
bool lambda_finite(const PhiProfile& p, double u0);

double phase_invariant_drift(const ReaperCurve& c, const PhiProfile& p);

struct EndpointReport {
  Endpoint kind = Endpoint::truncated;
  double lambda = kInf;
  double limit_slope = kInf;    // signed u' at the right end, inf when vertical
  double range_end = kInf;      // limit of phi along the curve
  std::string theorem_case;     // "increasing" or "decreasing"
};

EndpointReport endpoint_behavior(const PhiProfile& p, double u0, double tol = 1e-10);

class TiltedReaper {
 public:
  TiltedReaper(ReaperCurve base, PhiProfile p, double theta);

  double theta() const { return theta_; }
  double half_width() const { return half_width_; }
  const ReaperCurve& base() const { return base_; }

  double graph(double x, double y) const;
  GraphJet jet(double x, double y) const;

 private:
  ReaperCurve base_;
  PhiProfile p_;
  double theta_, half_width_;
};

TiltedReaper tilt_reaper(const ReaperCurve& c, const PhiProfile& p, double theta);

}  // namespace phimin
