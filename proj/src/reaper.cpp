#include "phimin/reaper.hpp"

#include "phimin/numerics/ode.hpp"
#include "phimin/numerics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phimin {

namespace nm = numerics;

namespace {

constexpr double kBlowUp = 1e8;

void require_monotone(const PhiProfile& p, const char* who) {
  if (!p.increasing() && !p.decreasing())
    throw std::invalid_argument(std::string(who) + ": profile " + p.label + " is not strictly monotone");
}

void require_domain(const PhiProfile& p, double u0, const char* who) {
  if (!p.in_domain(u0)) {
    std::ostringstream os;
    os << who << ": u0=" << u0 << " outside the domain of " << p.label;
    throw DomainError(os.str());
  }
}

// Increasing version of p together with the matching start point.
struct Oriented {
  PhiProfile q;
  double w0;
  double sign;  // u = sign * w
};

Oriented orient(const PhiProfile& p, double u0) {
  if (p.decreasing()) return {reflect(p), -u0, -1.0};
  return {p, u0, 1.0};
}

// sup of an increasing profile over [w0, domain_hi[.
double profile_sup(const PhiProfile& q, double w0) {
  if (q.range_hi) return *q.range_hi;
  const double hi = q.domain_hi;
  std::vector<double> vals;
  for (int k = 0; k <= 60; ++k) {
    const double w = std::isfinite(hi) ? hi - (hi - w0) * std::ldexp(1.0, -k)
                                       : w0 + std::ldexp(1.0, k);
    if (!q.in_domain(w)) break;
    const double v = q.phi_fn(w);
    if (!std::isfinite(v)) return kInf;
    vals.push_back(v);
  }
  const std::size_t n = vals.size();
  if (n < 8) throw std::runtime_error("range endpoint of " + q.label + " not estimable");
  double rho_max = 0;
  bool shrinking = true;
  for (std::size_t i = n - 4; i < n - 1; ++i) {
    const double d0 = vals[i] - vals[i - 1], d1 = vals[i + 1] - vals[i];
    if (d0 <= 0) {
      if (d1 <= 0) continue;  // saturated in floating point
      shrinking = false;
      break;
    }
    const double rho = d1 / d0;
    rho_max = std::max(rho_max, rho);
  }
  if (shrinking && rho_max <= 0.7) {
    const double d = vals[n - 1] - vals[n - 2];
    return vals[n - 1] + (rho_max > 0 ? d * rho_max / (1 - rho_max) : 0.0);
  }
  if (rho_max >= 0.95 || !shrinking) return kInf;
  throw std::runtime_error("range endpoint of " + q.label + " not estimable");
}

}  // namespace

std::string endpoint_name(Endpoint e) {
  switch (e) {
    case Endpoint::vertical_asymptotes: return "vertical_asymptotes";
    case Endpoint::finite_slope_infinite_height: return "finite_slope_infinite_height";
    case Endpoint::entire: return "entire";
    case Endpoint::reaches_domain_edge: return "reaches_domain_edge";
    case Endpoint::truncated: return "truncated";
  }
  return "?";
}

void ReaperCurve::finalize(const PhiProfile& p) {
  dphi_ = p.dphi_fn;
  if (samples.size() < 2) return;
  std::vector<double> x, u, du, ddu;
  for (const auto& s : samples) {
    if (!x.empty() && !(s.x > x.back())) continue;
    x.push_back(s.x);
    u.push_back(s.u);
    du.push_back(s.du);
    ddu.push_back(p.dphi_fn(s.u) * (1 + s.du * s.du));
  }
  // u'' is exact from the equation, so the quintic form costs nothing
  u_spline_ = nm::HermiteSpline(x, u, du, ddu);
}

double ReaperCurve::u_at(double x) const { return u_spline_(std::abs(x)); }

double ReaperCurve::du_at(double x) const {
  const double v = u_spline_.derivative(std::abs(x));
  return x < 0 ? -v : v;
}

double ReaperCurve::ddu_at(double x) const {
  const double d = du_at(x);
  return dphi_(u_at(x)) * (1 + d * d);
}

ReaperCurve solve_reaper_ivp(const PhiProfile& p, double u0, double x_max, double tol) {
  require_monotone(p, "solve_reaper_ivp");
  require_domain(p, u0, "solve_reaper_ivp");
  if (!(tol > 0) || !(x_max > 0)) throw std::invalid_argument("solve_reaper_ivp: need tol > 0, x_max > 0");

  const Oriented o = orient(p, u0);
  const PhiProfile& q = o.q;
  const double edge = q.domain_hi;
  const double edge_stop = edge - 1e-8 * std::max(1.0, std::abs(edge));

  auto rhs = [&q](double, const nm::State<2>& y) -> nm::State<2> {
    if (!q.in_domain(y[0])) return {NAN, NAN};
    return {y[1], q.dphi_fn(y[0]) * (1 + y[1] * y[1])};
  };
  nm::OdeOptions<2> opts;
  opts.rtol = tol;
  opts.atol = {tol, tol};
  opts.h_max = x_max / 256;
  opts.h_min = 1e-14 * x_max;

  ReaperCurve c;
  c.u0 = u0;
  c.conserved_ref = std::exp(p.phi(u0));
  c.samples.push_back({0.0, u0, 0.0});
  std::vector<nm::StepRecord<2>> steps;
  bool blown = false, at_edge = false;
  auto observe = [&](const nm::StepRecord<2>& r) {
    steps.push_back(r);
    c.samples.push_back({r.t1, o.sign * r.y1[0], o.sign * r.y1[1]});
    if (std::abs(r.y1[1]) > kBlowUp) return !(blown = true);
    if (std::isfinite(edge) && r.y1[0] >= edge_stop) return !(at_edge = true);
    return true;
  };
  const nm::OdeStats st = nm::Dopri5<2>(rhs, opts).integrate(0.0, {o.w0, 0.0}, x_max, observe);

  std::ostringstream diag;
  if (blown) {
    // abscissae where |u'| crosses 1e6, 1e7, 1e8, then Aitken extrapolation
    double xs[3];
    for (int j = 0; j < 3; ++j) {
      const double level = std::pow(10.0, 6 + j);
      auto it = std::find_if(steps.begin(), steps.end(),
                             [&](const auto& r) { return std::abs(r.y1[1]) >= level; });
      double lo = it->t0, hi = it->t1;
      for (int k = 0; k < 100 && hi - lo > 1e-17 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(nm::hermite(*it, 1, mid)) >= level ? hi : lo) = mid;
      }
      xs[j] = 0.5 * (lo + hi);
    }
    const double d1 = xs[1] - xs[0], d2 = xs[2] - xs[1];
    const double den = d2 - d1;
    c.lambda_est = den != 0 ? xs[2] - d2 * d2 / den : xs[2];
    c.lambda_est = std::max(c.lambda_est, c.samples.back().x);
    const bool finite_edge = std::isfinite(edge);
    c.endpoint = finite_edge ? Endpoint::reaches_domain_edge : Endpoint::vertical_asymptotes;
    diag << "slope exceeded 1e8 at x=" << c.samples.back().x;
  } else if (at_edge || (st.status == nm::OdeStatus::step_underflow && std::isfinite(edge) &&
                         edge - o.sign * c.samples.back().u <= 1e-4 * std::max(1.0, std::abs(edge)))) {
    c.endpoint = Endpoint::reaches_domain_edge;
    try {
      c.lambda_est = lambda_estimate(p, u0, tol);
    } catch (const std::exception&) {
      c.lambda_est = c.samples.back().x;
    }
    diag << "approached the domain edge at x=" << c.samples.back().x;
  } else if (st.status == nm::OdeStatus::reached_end) {
    try {
      const EndpointReport ep = endpoint_behavior(p, u0, tol);
      c.endpoint = ep.kind;
      c.lambda_est = ep.lambda;
      diag << "integrated to x_max=" << x_max;
    } catch (const std::exception& e) {
      c.endpoint = Endpoint::truncated;
      c.lambda_est = NAN;
      diag << "integrated to x_max=" << x_max << "; endpoint unclassified: " << e.what();
    }
  } else {
    c.endpoint = Endpoint::truncated;
    c.lambda_est = NAN;
    diag << (st.status == nm::OdeStatus::step_underflow ? "step underflow" : "integration failure")
         << " at x=" << c.samples.back().x;
  }
  c.diagnostic = diag.str();
  c.finalize(p);
  return c;
}

ReaperCurve reaper_quadrature(const PhiProfile& p, double u0, const std::vector<double>& z_grid,
                              double tol) {
  require_monotone(p, "reaper_quadrature");
  require_domain(p, u0, "reaper_quadrature");
  const double z0 = p.phi(u0);
  const double dir = p.increasing() ? 1.0 : -1.0;
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    if (!(z_grid[i] > z0)) throw std::invalid_argument("reaper_quadrature: z below z0");
    if (i > 0 && !(z_grid[i] > z_grid[i - 1]))
      throw std::invalid_argument("reaper_quadrature: z grid not increasing");
  }

  // u = phi^{-1}(tau) on the branch starting at u0 in direction dir
  auto inverse = [&](double tau) {
    double near = u0, far = u0;
    for (int k = -4;; ++k) {
      double cand = u0 + dir * std::ldexp(1.0, k);
      if (!p.in_domain(cand)) {
        cand = dir > 0 ? p.domain_hi : p.domain_lo;
        cand -= dir * 1e-12 * std::max(1.0, std::abs(cand)) * 1.0001;
        if (!p.in_domain(cand) || p.phi_fn(cand) < tau)
          throw std::domain_error("reaper_quadrature: phi not invertible up to the requested height");
        far = cand;
        break;
      }
      if (p.phi_fn(cand) >= tau) {
        far = cand;
        break;
      }
      near = cand;
      if (k > 1100) throw std::domain_error("reaper_quadrature: height beyond the range of phi");
    }
    for (int it = 0; it < 400; ++it) {
      if (std::abs(far - near) <= 1e-13 * std::max(1.0, std::abs(far))) break;
      const double mid = 0.5 * (near + far);
      (p.phi_fn(mid) >= tau ? far : near) = mid;
    }
    return 0.5 * (near + far);
  };
  auto h_abs = [&](double tau) { return std::abs(p.dphi_fn(inverse(tau))); };

  nm::QuadratureOptions qo;
  qo.abs_tol = tol / 4;
  qo.rel_tol = 1e-13;

  ReaperCurve c;
  c.u0 = u0;
  c.conserved_ref = std::exp(z0);
  c.samples.push_back({0.0, u0, 0.0});
  double x = 0;
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    nm::QuadratureResult r;
    if (i == 0) {
      // tau = z0 + s^2 removes the inverse square-root singularity at z0
      auto f = [&](double s) {
        if (s == 0) return std::sqrt(2.0) / h_abs(z0);
        return 2 * s / (h_abs(z0 + s * s) * std::sqrt(std::expm1(2 * s * s)));
      };
      r = nm::integrate(f, 0.0, std::sqrt(z_grid[0] - z0), qo);
    } else {
      auto f = [&](double tau) { return 1.0 / (h_abs(tau) * std::sqrt(std::expm1(2 * (tau - z0)))); };
      r = nm::integrate(f, z_grid[i - 1], z_grid[i], qo);
    }
    x += r.value;
    const double z = z_grid[i];
    c.samples.push_back({x, inverse(z), dir * std::sqrt(std::expm1(2 * (z - z0)))});
  }
  try {
    const EndpointReport ep = endpoint_behavior(p, u0, tol);
    c.endpoint = ep.kind;
    c.lambda_est = ep.lambda;
  } catch (const std::exception& e) {
    c.endpoint = Endpoint::truncated;
    c.lambda_est = NAN;
    c.diagnostic = e.what();
  }
  c.finalize(p);
  return c;
}

FinitenessReport lambda_finiteness(const PhiProfile& p, double u0) {
  require_monotone(p, "lambda_finite");
  require_domain(p, u0, "lambda_finite");
  const Oriented o = orient(p, u0);
  const PhiProfile& q = o.q;
  FinitenessReport rep;

  // direction of u0 -> Lambda from the sign of the second derivative
  bool pos = true, neg = true;
  for (int k = -10; k <= 40; ++k) {
    const double w = std::isfinite(q.domain_hi)
                         ? q.domain_hi - (q.domain_hi - o.w0) * std::ldexp(1.0, -k - 10)
                         : o.w0 + std::ldexp(1.0, k);
    if (!q.in_domain(w)) continue;
    const double d2 = q.ddphi_fn(w);
    pos = pos && d2 >= 0;
    neg = neg && d2 <= 0;
  }
  const int trend_w = pos ? -1 : (neg ? 1 : 0);
  rep.trend_in_u0 = o.sign > 0 ? trend_w : -trend_w;

  if (std::isfinite(q.domain_hi)) {
    rep.finite = true;
    return rep;
  }
  const double z0 = q.phi(o.w0);
  auto f = [&](double w) { return std::exp(-(q.phi_fn(w) - z0)); };
  nm::QuadratureOptions qo;
  qo.abs_tol = 1e-300;
  qo.rel_tol = 1e-10;
  std::vector<double> ratios;
  double prev = 0;
  for (int k = 0; k <= 60; ++k) {
    const double a = o.w0 + (std::ldexp(1.0, k) - 1), b = o.w0 + (std::ldexp(1.0, k + 1) - 1);
    const double w = nm::integrate(f, a, b, qo).value;
    rep.windows = k + 1;
    if (w < 1e-280) {
      rep.finite = true;
      return rep;
    }
    if (k > 0) ratios.push_back(w / prev);
    prev = w;
    if (ratios.size() >= 4) {
      const auto last = ratios.end() - 4;
      if (std::all_of(last, ratios.end(), [](double r) { return r <= 0.9; })) {
        rep.finite = true;
        return rep;
      }
      if (std::all_of(last, ratios.end(), [](double r) { return r >= 0.98; })) {
        rep.finite = false;
        return rep;
      }
    }
  }
  throw std::runtime_error("lambda_finite: tail of exp(-phi) undetermined after 60 windows");
}

bool lambda_finite(const PhiProfile& p, double u0) { return lambda_finiteness(p, u0).finite; }

double lambda_estimate(const PhiProfile& p, double u0, double tol) {
  require_monotone(p, "lambda_estimate");
  require_domain(p, u0, "lambda_estimate");
  if (!lambda_finite(p, u0)) return kInf;
  const Oriented o = orient(p, u0);
  const PhiProfile& q = o.q;
  const double w0 = o.w0, E = q.domain_hi;
  const double z0 = q.phi(w0), d1 = q.dphi(w0), d2 = q.ddphi(w0);
  const auto d3 = q.dddphi(w0);
  const double scale = std::max(1.0, std::abs(w0));
  const double cut = (d3 ? 1e-4 : 1e-6) * scale;

  // phi(w0 + t) - phi(w0), Taylor near t = 0 to avoid cancellation
  auto dz = [&](double t) {
    if (t < cut) return t * (d1 + t * (0.5 * d2 + t * (d3 ? *d3 / 6 : 0.0)));
    return q.phi_fn(w0 + t) - z0;
  };
  auto g = [&](double t) {
    if (w0 + t >= E) return 0.0;
    const double e = std::expm1(2 * dz(t));
    return std::isfinite(e) ? 1.0 / std::sqrt(e) : 0.0;
  };
  nm::QuadratureOptions qo;
  qo.abs_tol = tol / 16;
  qo.rel_tol = 1e-13;

  const double delta = std::isfinite(E) ? std::min(scale, 0.5 * (E - w0)) : scale;
  auto head = [&](double s) {
    if (s == 0) return 2.0 / std::sqrt(2 * d1);
    return 2 * s * g(s * s);
  };
  double total = nm::integrate(head, 0.0, std::sqrt(delta), qo).value;
  if (std::isfinite(E)) return total + nm::integrate(g, delta, E - w0, qo).value;

  double lo = delta, width = delta, prev = 0;
  for (int k = 0; k < 200; ++k) {
    const double w = nm::integrate(g, lo, lo + width, qo).value;
    total += w;
    if (w == 0) return total;
    if (k > 0) {
      const double rho = w / prev;
      if (w < tol / 8 && rho < 0.5) return total;
      if (rho < 0.95 && w * rho / (1 - rho) < tol / 8) return total;
    }
    prev = w;
    lo += width;
    width *= 2;
  }
  throw nm::QuadratureError("lambda_estimate: tail did not settle within 200 windows", total, kInf);
}

double phase_invariant_drift(const ReaperCurve& c, const PhiProfile& p) {
  const double z0 = p.phi(c.u0);
  double drift = 0;
  for (const auto& s : c.samples) {
    const double v = std::exp(p.phi(s.u) - z0) / std::sqrt(1 + s.du * s.du) - 1.0;
    drift = std::max(drift, std::abs(v));
  }
  return drift;
}

EndpointReport endpoint_behavior(const PhiProfile& p, double u0, double tol) {
  require_monotone(p, "endpoint_behavior");
  require_domain(p, u0, "endpoint_behavior");
  const Oriented o = orient(p, u0);
  const PhiProfile& q = o.q;
  EndpointReport r;
  r.theorem_case = p.increasing() ? "increasing_profile" : "decreasing_profile";
  const double z0 = q.phi(o.w0);
  const double c = profile_sup(q, o.w0);
  r.range_end = c;
  const double slope = std::isfinite(c) ? std::sqrt(std::expm1(2 * (c - z0))) : kInf;
  if (std::isfinite(q.domain_hi)) {
    r.kind = Endpoint::reaches_domain_edge;
    r.lambda = lambda_estimate(p, u0, tol);
    r.limit_slope = o.sign * slope;
    return r;
  }
  if (std::isfinite(c)) {
    r.kind = Endpoint::finite_slope_infinite_height;
    r.lambda = kInf;
    r.limit_slope = o.sign * slope;
    return r;
  }
  r.lambda = lambda_estimate(p, u0, tol);
  r.kind = std::isfinite(r.lambda) ? Endpoint::vertical_asymptotes : Endpoint::entire;
  r.limit_slope = o.sign * kInf;
  return r;
}

TiltedReaper::TiltedReaper(ReaperCurve base, PhiProfile p, double theta)
    : base_(std::move(base)), p_(std::move(p)), theta_(theta) {
  if (!(theta > 0 && theta < M_PI / 2)) throw std::invalid_argument("tilt angle must lie in ]0, pi/2[");
  half_width_ = base_.lambda_est / std::cos(theta);
}

double TiltedReaper::graph(double x, double y) const {
  if (!(std::abs(x) < half_width_)) throw std::out_of_range("tilted reaper: x outside the half-width");
  const double c = std::cos(theta_);
  return base_.u_at(x * c) / (c * c) + y * std::tan(theta_);
}

GraphJet TiltedReaper::jet(double x, double y) const {
  if (!(std::abs(x) < half_width_)) throw std::out_of_range("tilted reaper: x outside the half-width");
  const double c = std::cos(theta_);
  GraphJet j;
  j.u = base_.u_at(x * c) / (c * c) + y * std::tan(theta_);
  j.ux = base_.du_at(x * c) / c;
  j.uy = std::tan(theta_);
  j.uxx = base_.ddu_at(x * c);
  return j;
}

TiltedReaper tilt_reaper(const ReaperCurve& c, const PhiProfile& p, double theta) {
  return TiltedReaper(c, p, theta);
}

}  // namespace phimin
