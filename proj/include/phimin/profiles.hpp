#pragma once

// Weight profiles phi(u) on an open interval ]a, b[ with analytic derivatives.

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phimin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Monotonicity { strictly_increasing, strictly_decreasing, none };

struct Growth {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> series;  // a_1, a_2, ... of dphi ~ alpha u + beta + sum a_n / u^n
  bool quadratic_law = true;   // false when dphi - alpha u has no finite limit
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

using RealFn = std::function<double(double)>;

class PhiProfile {
 public:
  double domain_lo = -kInf;
  double domain_hi = kInf;  // only finite for reflected profiles
  Monotonicity monotonicity = Monotonicity::none;
  Growth growth;
  std::string label = "custom";
  std::string spec;  // preset string that reproduces this profile
  // Range ]b, c[ of phi over the domain when known analytically.
  std::optional<double> range_lo, range_hi;

  RealFn phi_fn, dphi_fn, ddphi_fn, dddphi_fn;  // dddphi_fn may be empty

  double phi(double u) const { return phi_fn(check(u)); }
  double dphi(double u) const { return dphi_fn(check(u)); }
  double ddphi(double u) const { return ddphi_fn(check(u)); }
  std::optional<double> dddphi(double u) const {
    if (!dddphi_fn) return std::nullopt;
    return dddphi_fn(check(u));
  }
  bool has_dddphi() const { return static_cast<bool>(dddphi_fn); }
  bool in_domain(double u) const;
  bool increasing() const { return monotonicity == Monotonicity::strictly_increasing; }
  bool decreasing() const { return monotonicity == Monotonicity::strictly_decreasing; }

 private:
  double check(double u) const;
};

enum class PresetKind { constant, soliton, singular_log, quadratic, series, power, ulogu, arctan, poly };

/// Presets. Params per kind:
///   constant [c=0], soliton [], singular_log [alpha=1], quadratic [alpha=1, beta=0],
///   series [alpha, beta, a1, a2, ...], power [k] (dphi = u^k on ]0,inf[),
///   ulogu [] (dphi = u log u on ]1,inf[), arctan [], poly [c0, c1, ...] (dphi = sum c_k u^k).
PhiProfile make_preset(PresetKind kind, const std::vector<double>& params = {});

/// Parses "kind[:p1,p2,...]".
PhiProfile parse_profile(const std::string& spec);

PresetKind parse_kind(const std::string& name);
std::string kind_name(PresetKind kind);

/// Profile from user-supplied closures; monotonicity inferred by sampling.
PhiProfile make_custom(RealFn phi, RealFn dphi, RealFn ddphi, RealFn dddphi, double domain_lo,
                       Growth growth = {});

/// psi(w) = phi(-w) on ]-b, -a[, turning a decreasing profile into an increasing one.
PhiProfile reflect(const PhiProfile& p);

struct ValidationReport {
  bool strictly_increasing = false;
  bool strictly_decreasing = false;
  bool convex = false;
  std::optional<double> lambda_witness;      // smallest 2^k with ddphi + l*dphi^2 >= 0
  std::optional<bool> dddphi_nonpositive;    // empty when dddphi is not supplied
  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate_profile(const PhiProfile& p, const std::vector<double>& grid);

enum class GrowthClass { at_most_linear, power_alpha_gt1, quadratic_growth, undetermined };

struct GrowthReport {
  GrowthClass kind = GrowthClass::undetermined;
  double exponent = 0.0;  // log-log fit of dphi over the tail
  double residual = 0.0;  // rms of that fit
  double alpha = 0.0, beta = 0.0;
  int samples = 0;
};

GrowthReport growth_classify(const PhiProfile& p);
std::string growth_name(GrowthClass g);

}  // namespace phimin
