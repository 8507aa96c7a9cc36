#pragma once

// Checks of the large-r behaviour of rotational graphs against their expansion
// laws. Every verdict is a measured number compared with a stated tolerance.

#include "phimin/profiles.hpp"
#include "phimin/reaper.hpp"
#include "phimin/rotational.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace phimin {

enum class Law { soliton, alpha_positive, alpha_zero, G_expansion, phi_exponential };
std::string law_name(Law l);

struct SubCheck {
  std::string name;
  double value = 0;
  double target = 0;
  double tolerance = 0;
  bool pass = false;
  std::vector<double> trend;  // per-subwindow statistic, when relevant
};

struct AsymptoticReport {
  Law law = Law::soliton;
  std::pair<double, double> window{0, 0};
  std::map<std::string, double> fitted;
  double residual_sup = 0;
  bool verdict = false;
  double tolerance = 0;
  std::vector<SubCheck> subchecks;
};

struct CheckOptions {
  double r_lo = 15, r_hi = 30;  // soliton / alpha = 0 window
  double ratio_tol = 0.05;      // leading-order ratios
  double limit_tol = 0.10;      // next-order limits
  double const_tol = 0.02;      // |d - d_bar| on the soliton window
};

/// d(r) = u(r) - r^2/2 + log r on the window, fitted as d_bar + c2/r^2.
AsymptoticReport check_soliton_expansion(const RotationalCurve& c, const CheckOptions& o = {});
AsymptoticReport check_soliton_expansion(const std::vector<double>& r, const std::vector<double>& u,
                                         const CheckOptions& o = {});
/// Reaper curves are not rotational: always throws.
AsymptoticReport check_soliton_expansion(const ReaperCurve& c, const CheckOptions& o = {});

AsymptoticReport check_alpha_positive(const PhiProfile& p, const RotationalCurve& c,
                                      const CheckOptions& o = {});

AsymptoticReport check_alpha_zero(const PhiProfile& p, const RotationalCurve& c,
                                  const CheckOptions& o = {});
/// Same limit on raw samples (r, u, u').
AsymptoticReport check_alpha_zero(const PhiProfile& p, const std::vector<double>& r,
                                  const std::vector<double>& u, const std::vector<double>& du,
                                  const CheckOptions& o = {});

/// G(u) = int_{u_ref}^{u} d xi / dphi(xi).
double G_integral(const PhiProfile& p, double u_ref, double u);

struct TemplateOptions {
  double tolerance = 0.02;
  double min_ratio = 1.9;  // annulus R <= |x| <= 2R
};

/// Fits the radial end template to scattered graph samples (x, y, u).
AsymptoticReport match_end_template(const std::vector<std::array<double, 3>>& samples,
                                    const PhiProfile& p, const TemplateOptions& o = {});

/// Number of bowl samples with u'/dphi(u) - r > 0.
int v1_violations(const RotationalCurve& c);

}  // namespace phimin
