#include "phimin/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace phimin {

namespace {

double edge_margin(double a) { return 1e-12 * std::max(1.0, std::abs(a)); }

[[noreturn]] void bad_params(const std::string& kind, const std::string& why) {
  throw std::invalid_argument("profile " + kind + ": " + why);
}

double param(const std::vector<double>& p, std::size_t i, double fallback) {
  return i < p.size() ? p[i] : fallback;
}

// Largest sign change of f on a geometric grid in ]lo_scan, hi_scan[, refined by
// bisection. Returns nullopt when f has no sign change there.
std::optional<double> largest_root(const RealFn& f, const std::vector<double>& grid) {
  for (std::size_t i = grid.size() - 1; i > 0; --i) {
    const double fa = f(grid[i - 1]), fb = f(grid[i]);
    if (fb > 0 && fa <= 0) {
      double lo = grid[i - 1], hi = grid[i];
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? hi : lo) = mid;
      }
      return hi;
    }
  }
  return std::nullopt;
}

std::string join_spec(const std::string& name, const std::vector<double>& params) {
  std::ostringstream os;
  os.precision(17);
  os << name;
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : ":") << params[i];
  return os.str();
}

PhiProfile polynomial_profile(const std::vector<double>& c_in) {
  std::vector<double> c = c_in;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.empty()) bad_params("poly", "all coefficients vanish");
  if (c.back() < 0) bad_params("poly", "dphi must be positive at +inf");
  const std::size_t n = c.size();
  auto horner = [c](double u) {
    double s = 0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * u + c[k];
    return s;
  };
  std::vector<double> d1(n > 1 ? n - 1 : 0), d2(n > 2 ? n - 2 : 0), anti(n + 1, 0.0);
  for (std::size_t k = 1; k < n; ++k) d1[k - 1] = k * c[k];
  for (std::size_t k = 2; k < n; ++k) d2[k - 2] = k * (k - 1.0) * c[k];
  for (std::size_t k = 0; k < n; ++k) anti[k + 1] = c[k] / (k + 1.0);
  auto eval = [](const std::vector<double>& v) {
    return [v](double u) {
      double s = 0;
      for (std::size_t k = v.size(); k-- > 0;) s = s * u + v[k];
      return s;
    };
  };
  PhiProfile p;
  p.phi_fn = eval(anti);
  p.dphi_fn = horner;
  p.ddphi_fn = eval(d1);
  p.dddphi_fn = eval(d2);
  p.monotonicity = Monotonicity::strictly_increasing;
  double bound = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) bound = std::max(bound, 1.0 + std::abs(c[k] / c.back()));
  std::vector<double> grid;
  const int m = 200000;
  for (int i = 0; i <= m; ++i) grid.push_back(-bound + 2.0 * bound * i / m);
  if (auto r = largest_root(horner, grid)) p.domain_lo = *r;
  if (n == 1) {
    p.growth = {0.0, c[0], {}, true};
  } else if (n == 2) {
    p.growth = {c[1], c[0], {}, true};
  } else {
    p.growth.quadratic_law = false;
  }
  p.range_hi = kInf;
  return p;
}

}  // namespace

bool PhiProfile::in_domain(double u) const {
  if (std::isnan(u)) return false;
  if (std::isfinite(domain_lo) && u <= domain_lo + edge_margin(domain_lo)) return false;
  if (std::isfinite(domain_hi) && u >= domain_hi - edge_margin(domain_hi)) return false;
  return true;
}

double PhiProfile::check(double u) const {
  if (!in_domain(u)) {
    std::ostringstream os;
    os.precision(17);
    os << "profile " << label << ": u=" << u << " outside ]" << domain_lo << ", " << domain_hi
       << "[";
    throw DomainError(os.str());
  }
  return u;
}

PresetKind parse_kind(const std::string& name) {
  static const std::map<std::string, PresetKind> kinds = {
      {"constant", PresetKind::constant},  {"soliton", PresetKind::soliton},
      {"singular_log", PresetKind::singular_log}, {"quadratic", PresetKind::quadratic},
      {"series", PresetKind::series},      {"power", PresetKind::power},
      {"ulogu", PresetKind::ulogu},        {"arctan", PresetKind::arctan},
      {"poly", PresetKind::poly}};
  auto it = kinds.find(name);
  if (it == kinds.end()) throw std::invalid_argument("unknown profile kind '" + name + "'");
  return it->second;
}

std::string kind_name(PresetKind kind) {
  switch (kind) {
    case PresetKind::constant: return "constant";
    case PresetKind::soliton: return "soliton";
    case PresetKind::singular_log: return "singular_log";
    case PresetKind::quadratic: return "quadratic";
    case PresetKind::series: return "series";
    case PresetKind::power: return "power";
    case PresetKind::ulogu: return "ulogu";
    case PresetKind::arctan: return "arctan";
    case PresetKind::poly: return "poly";
  }
  return "?";
}

PhiProfile make_preset(PresetKind kind, const std::vector<double>& params) {
  const std::string name = kind_name(kind);
  PhiProfile p;
  switch (kind) {
    case PresetKind::constant: {
      const double c = param(params, 0, 0.0);
      p.phi_fn = [c](double) { return c; };
      p.dphi_fn = [](double) { return 0.0; };
      p.ddphi_fn = [](double) { return 0.0; };
      p.dddphi_fn = [](double) { return 0.0; };
      p.monotonicity = Monotonicity::none;
      p.range_lo = p.range_hi = c;
      break;
    }
    case PresetKind::soliton: {
      p.phi_fn = [](double u) { return u; };
      p.dphi_fn = [](double) { return 1.0; };
      p.ddphi_fn = [](double) { return 0.0; };
      p.dddphi_fn = [](double) { return 0.0; };
      p.monotonicity = Monotonicity::strictly_increasing;
      p.growth = {0.0, 1.0, {}, true};
      p.range_lo = -kInf;
      p.range_hi = kInf;
      break;
    }
    case PresetKind::singular_log: {
      const double a = param(params, 0, 1.0);
      if (a == 0.0 || !std::isfinite(a)) bad_params(name, "exponent must be nonzero");
      p.phi_fn = [a](double u) { return a * std::log(u); };
      p.dphi_fn = [a](double u) { return a / u; };
      p.ddphi_fn = [a](double u) { return -a / (u * u); };
      p.dddphi_fn = [a](double u) { return 2 * a / (u * u * u); };
      p.domain_lo = 0.0;
      p.monotonicity = a > 0 ? Monotonicity::strictly_increasing : Monotonicity::strictly_decreasing;
      p.growth = {0.0, 0.0, {a}, true};
      p.range_lo = -kInf;
      p.range_hi = kInf;
      break;
    }
    case PresetKind::quadratic: {
      const double a = param(params, 0, 1.0), b = param(params, 1, 0.0);
      if (a < 0) bad_params(name, "alpha must be >= 0");
      if (a == 0 && b <= 0) bad_params(name, "alpha = 0 needs beta > 0");
      p.phi_fn = [a, b](double u) { return 0.5 * a * u * u + b * u; };
      p.dphi_fn = [a, b](double u) { return a * u + b; };
      p.ddphi_fn = [a](double) { return a; };
      p.dddphi_fn = [](double) { return 0.0; };
      p.domain_lo = a > 0 ? -b / a : -kInf;
      p.monotonicity = Monotonicity::strictly_increasing;
      p.growth = {a, b, {}, true};
      p.range_lo = a > 0 ? -b * b / (2 * a) : -kInf;
      p.range_hi = kInf;
      break;
    }
    case PresetKind::series: {
      if (params.size() < 2) bad_params(name, "needs alpha, beta");
      const double a = params[0], b = params[1];
      std::vector<double> an(params.begin() + 2, params.end());
      while (!an.empty() && an.back() == 0.0) an.pop_back();
      if (a < 0) bad_params(name, "alpha must be >= 0");
      if (an.empty()) {
        p = make_preset(PresetKind::quadratic, {a, b});
        p.label = name;
        p.spec = join_spec(name, params);
        return p;
      }
      auto dphi = [a, b, an](double u) {
        double s = 0, inv = 1.0 / u, pw = inv;
        for (double c : an) s += c * pw, pw *= inv;
        return a * u + b + s;
      };
      auto phi = [a, b, an](double u) {
        double s = an[0] * std::log(u), inv = 1.0 / u, pw = inv;
        for (std::size_t n = 2; n <= an.size(); ++n) {
          s -= an[n - 1] * pw / (n - 1.0);
          pw *= inv;
        }
        return 0.5 * a * u * u + b * u + s;
      };
      auto ddphi = [a, an](double u) {
        double s = 0, inv = 1.0 / u, pw = inv * inv;
        for (std::size_t n = 1; n <= an.size(); ++n) s -= n * an[n - 1] * pw, pw *= inv;
        return a + s;
      };
      auto dddphi = [an](double u) {
        double s = 0, inv = 1.0 / u, pw = inv * inv * inv;
        for (std::size_t n = 1; n <= an.size(); ++n) s += n * (n + 1.0) * an[n - 1] * pw, pw *= inv;
        return s;
      };
      std::vector<double> grid;
      for (double u = 1e-8; u < 1e8; u *= 1.001) grid.push_back(u);
      if (dphi(grid.back()) <= 0) bad_params(name, "dphi not positive at large u");
      p.domain_lo = largest_root(dphi, grid).value_or(0.0);
      p.phi_fn = phi;
      p.dphi_fn = dphi;
      p.ddphi_fn = ddphi;
      p.dddphi_fn = dddphi;
      p.monotonicity = Monotonicity::strictly_increasing;
      p.growth = {a, b, an, true};
      p.range_hi = kInf;
      break;
    }
    case PresetKind::power: {
      const double k = param(params, 0, 2.0);
      if (!(k >= 0)) bad_params(name, "exponent must be >= 0");
      p.phi_fn = [k](double u) { return std::pow(u, k + 1) / (k + 1); };
      p.dphi_fn = [k](double u) { return std::pow(u, k); };
      p.ddphi_fn = [k](double u) { return k == 0 ? 0.0 : k * std::pow(u, k - 1); };
      p.dddphi_fn = [k](double u) {
        return (k == 0 || k == 1) ? 0.0 : k * (k - 1) * std::pow(u, k - 2);
      };
      p.domain_lo = 0.0;
      p.monotonicity = Monotonicity::strictly_increasing;
      if (k == 1) p.growth = {1.0, 0.0, {}, true};
      else if (k == 0) p.growth = {0.0, 1.0, {}, true};
      else p.growth.quadratic_law = false;
      p.range_lo = 0.0;
      p.range_hi = kInf;
      break;
    }
    case PresetKind::ulogu: {
      p.phi_fn = [](double u) { return 0.5 * u * u * std::log(u) - 0.25 * u * u; };
      p.dphi_fn = [](double u) { return u * std::log(u); };
      p.ddphi_fn = [](double u) { return std::log(u) + 1.0; };
      p.dddphi_fn = [](double u) { return 1.0 / u; };
      p.domain_lo = 1.0;
      p.monotonicity = Monotonicity::strictly_increasing;
      p.growth.quadratic_law = false;
      p.range_lo = -0.25;
      p.range_hi = kInf;
      break;
    }
    case PresetKind::arctan: {
      p.phi_fn = [](double u) { return std::atan(u); };
      p.dphi_fn = [](double u) { return 1.0 / (1.0 + u * u); };
      p.ddphi_fn = [](double u) { return -2.0 * u / ((1.0 + u * u) * (1.0 + u * u)); };
      p.dddphi_fn = [](double u) {
        const double q = 1.0 + u * u;
        return (6.0 * u * u - 2.0) / (q * q * q);
      };
      p.monotonicity = Monotonicity::strictly_increasing;
      p.growth = {0.0, 0.0, {}, true};
      p.range_lo = -M_PI / 2;
      p.range_hi = M_PI / 2;
      break;
    }
    case PresetKind::poly:
      p = polynomial_profile(params);
      break;
  }
  p.label = name;
  p.spec = join_spec(name, params);
  return p;
}

PhiProfile parse_profile(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw std::invalid_argument("bad profile parameter '" + tok + "'");
      params.push_back(v);
    }
  }
  return make_preset(parse_kind(name), params);
}

PhiProfile make_custom(RealFn phi, RealFn dphi, RealFn ddphi, RealFn dddphi, double domain_lo,
                       Growth growth) {
  if (!phi || !dphi || !ddphi) throw std::invalid_argument("custom profile needs phi, dphi, ddphi");
  PhiProfile p;
  p.phi_fn = std::move(phi);
  p.dphi_fn = std::move(dphi);
  p.ddphi_fn = std::move(ddphi);
  p.dddphi_fn = std::move(dddphi);
  p.domain_lo = domain_lo;
  p.growth = std::move(growth);
  std::vector<double> pts;
  const double base = std::isfinite(domain_lo) ? domain_lo : 0.0;
  for (int k = -20; k <= 30; ++k) {
    pts.push_back(base + std::ldexp(1.0, k));
    // the negative side stops at 256 so that exp-like profiles do not underflow to 0
    if (!std::isfinite(domain_lo) && k <= 8) pts.push_back(-std::ldexp(1.0, k));
  }
  bool pos = true, neg = true;
  int counted = 0;
  for (double u : pts) {
    if (!p.in_domain(u)) continue;
    const double d = p.dphi_fn(u);
    // overflow or underflow far out says nothing about the sign
    if (!std::isfinite(d) || (d != 0 && std::abs(d) < std::numeric_limits<double>::min())) continue;
    pos = pos && d > 0;
    neg = neg && d < 0;
    ++counted;
  }
  pos = pos && counted > 0;
  neg = neg && counted > 0;
  p.monotonicity = pos ? Monotonicity::strictly_increasing
                       : (neg ? Monotonicity::strictly_decreasing : Monotonicity::none);
  return p;
}

PhiProfile reflect(const PhiProfile& p) {
  PhiProfile q;
  q.domain_lo = -p.domain_hi;
  q.domain_hi = -p.domain_lo;
  auto f = p.phi_fn, d = p.dphi_fn, dd = p.ddphi_fn, ddd = p.dddphi_fn;
  q.phi_fn = [f](double w) { return f(-w); };
  q.dphi_fn = [d](double w) { return -d(-w); };
  q.ddphi_fn = [dd](double w) { return dd(-w); };
  if (ddd) q.dddphi_fn = [ddd](double w) { return -ddd(-w); };
  switch (p.monotonicity) {
    case Monotonicity::strictly_increasing: q.monotonicity = Monotonicity::strictly_decreasing; break;
    case Monotonicity::strictly_decreasing: q.monotonicity = Monotonicity::strictly_increasing; break;
    case Monotonicity::none: q.monotonicity = Monotonicity::none; break;
  }
  q.growth.quadratic_law = false;
  q.range_lo = p.range_lo;
  q.range_hi = p.range_hi;
  q.label = "reflected " + p.label;
  q.spec = p.spec;
  return q;
}

ValidationReport validate_profile(const PhiProfile& p, const std::vector<double>& grid_in) {
  if (grid_in.empty()) throw std::invalid_argument("validate_profile: empty grid");
  for (double u : grid_in)
    if (!p.in_domain(u)) {
      std::ostringstream os;
      os << "validate_profile: grid point " << u << " outside the domain of " << p.label;
      throw DomainError(os.str());
    }
  std::vector<double> grid = grid_in;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  ValidationReport r;
  bool inc = true, dec = true, convex = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = p.dphi(grid[i]);
    inc = inc && d > 0;
    dec = dec && d < 0;
    convex = convex && p.ddphi(grid[i]) >= 0;
    if (i > 0) {
      const double step = p.phi(grid[i]) - p.phi(grid[i - 1]);
      inc = inc && step > 0;
      dec = dec && step < 0;
    }
  }
  r.strictly_increasing = inc;
  r.strictly_decreasing = dec;
  r.convex = convex;
  for (int k = -20; k <= 20 && !r.lambda_witness; ++k) {
    const double lam = std::ldexp(1.0, k);
    bool ok = true;
    for (double u : grid) {
      const double d = p.dphi(u);
      const double dd = p.ddphi(u);
      ok = ok && dd + lam * d * d >= -1e-12 * (std::abs(dd) + lam * d * d);
    }
    if (ok) r.lambda_witness = lam;
  }
  if (p.has_dddphi()) {
    bool nonpos = true;
    for (double u : grid) nonpos = nonpos && *p.dddphi(u) <= 0;
    r.dddphi_nonpositive = nonpos;
  }
  return r;
}

std::string growth_name(GrowthClass g) {
  switch (g) {
    case GrowthClass::at_most_linear: return "at_most_linear";
    case GrowthClass::power_alpha_gt1: return "power_alpha_gt1";
    case GrowthClass::quadratic_growth: return "quadratic_growth";
    case GrowthClass::undetermined: return "undetermined";
  }
  return "?";
}

GrowthReport growth_classify(const PhiProfile& p) {
  if (std::isfinite(p.domain_hi)) throw DomainError("growth_classify: domain bounded above");
  const double u_min = std::isfinite(p.domain_lo) ? std::max(1.0, p.domain_lo + 1.0) : 1.0;
  std::vector<double> us, ds, dds;
  for (int k = 0; k <= 40; ++k) {
    const double u = u_min * std::ldexp(1.0, k);
    double d = 0, dd = 0;
    try {
      d = p.dphi(u);
      dd = p.ddphi(u);
    } catch (const DomainError&) {
      break;
    }
    if (!std::isfinite(d) || !std::isfinite(dd)) break;
    us.push_back(u);
    ds.push_back(d);
    dds.push_back(dd);
  }
  GrowthReport g;
  const int n = static_cast<int>(us.size());
  g.samples = n;
  if (n < 12) return g;

  const bool flat = std::all_of(ds.begin(), ds.end(), [](double d) { return d == 0.0; });
  if (flat) {
    g.kind = GrowthClass::at_most_linear;
    return g;
  }
  if (std::any_of(ds.begin() + n / 2, ds.end(), [](double d) { return d == 0.0; })) return g;

  // log-log regression over the tail
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int i0 = n / 2, m = n - i0;
  for (int i = i0; i < n; ++i) {
    const double x = std::log(us[i]), y = std::log(std::abs(ds[i]));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icept = (sy - slope * sx) / m;
  double rss = 0;
  for (int i = i0; i < n; ++i) {
    const double e = std::log(std::abs(ds[i])) - icept - slope * std::log(us[i]);
    rss += e * e;
  }
  g.exponent = slope;
  g.residual = std::sqrt(rss / m);

  auto local_slope = [&](int i) {
    return std::log(std::abs(ds[i + 1] / ds[i])) / std::log(2.0);
  };

  // quadratic law: ddphi -> alpha > 0 and dphi - alpha u -> beta
  const double a1 = dds[n - 1], a0 = dds[n - 2];
  if (a1 > 1e-8 && std::abs(a1 - a0) <= 1e-6 * std::max(1.0, std::abs(a1))) {
    const int j1 = std::min(20, n - 1), j2 = std::min(25, n - 1);
    const double b1 = ds[j1] - a1 * us[j1], b2 = ds[j2] - a1 * us[j2];
    if (j1 != j2 && std::abs(b1 - b2) <= 1e-4 * std::max(1.0, std::abs(b2))) {
      g.kind = GrowthClass::quadratic_growth;
      g.alpha = a1;
      g.beta = b2;
      return g;
    }
  }
  const double s_last = local_slope(n - 2), s_prev = local_slope(n - 5);
  if (slope > 1.1 && std::abs(s_last - s_prev) < 0.002) {
    g.kind = GrowthClass::power_alpha_gt1;
    return g;
  }
  const double r_mid = std::abs(ds[n / 2]) / us[n / 2];
  const double r_end = std::abs(ds[n - 1]) / us[n - 1];
  if (r_end <= 1.1 * r_mid + 1e-12) g.kind = GrowthClass::at_most_linear;
  return g;
}

}  // namespace phimin
