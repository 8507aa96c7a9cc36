#include "phimin/rotational.hpp"

#include "phimin/numerics/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phimin {

namespace nm = numerics;

namespace {

void require_bowl_profile(const PhiProfile& p, double z0, const char* who) {
  if (!p.increasing())
    throw std::invalid_argument(std::string(who) + ": profile " + p.label + " is not strictly increasing");
  if (!p.in_domain(z0)) {
    std::ostringstream os;
    os << who << ": z0=" << z0 << " outside the domain of " << p.label;
    throw DomainError(os.str());
  }
  for (int k = -10; k <= 30; ++k) {
    const double u = z0 + std::ldexp(1.0, k);
    if (p.in_domain(u) && p.ddphi(u) < 0) {
      std::ostringstream os;
      os << who << ": profile " << p.label << " is not convex at u=" << u;
      throw PreconditionError(os.str(), u);
    }
  }
  if (p.ddphi(z0) < 0) throw PreconditionError(std::string(who) + ": profile not convex at z0", z0);
}

RotSample graph_sample(const PhiProfile& p, double s, double r, double u, double q, double ddu,
                       double v1) {
  RotSample o;
  o.s = s;
  o.x = r;
  o.z = u;
  o.theta = std::atan(q);
  o.slope = q;
  o.ddu = ddu;
  o.v1 = v1;
  const double h = std::hypot(1.0, q);
  o.kappa = ddu / (h * h * h);
  (void)p;
  return o;
}

RotSample arc_sample(const PhiProfile& p, double s, double x, double z, double theta) {
  RotSample o;
  o.s = s;
  o.x = x;
  o.z = z;
  o.theta = theta;
  const double c = std::cos(theta), sn = std::sin(theta);
  const double d = p.dphi(z);
  o.kappa = d * c - sn / x;
  o.slope = sn / c;
  if (c > 1e-12) {
    o.ddu = o.kappa / (c * c * c);
    o.v1 = o.slope / d - x;
  } else {
    o.ddu = o.v1 = NAN;
  }
  return o;
}

double aitken(const double xs[3]) {
  const double d1 = xs[1] - xs[0], d2 = xs[2] - xs[1];
  const double den = d2 - d1;
  return den != 0 ? xs[2] - d2 * d2 / den : xs[2];
}

// Far field: state (u, V, s) over r with V = u'/dphi(u) - r. Appends samples.
void far_field(const PhiProfile& p, double r0, nm::State<3> y0, double v_atol,
               const RotationalOptions& o, RotationalCurve& c) {
  auto rhs = [&p](double r, const nm::State<3>& y) -> nm::State<3> {
    if (!p.in_domain(y[0])) return {NAN, NAN, NAN};
    const double d = p.dphi_fn(y[0]), dd = p.ddphi_fn(y[0]);
    const double w = r + y[1], q = d * w;
    return {q, -y[1] / r - y[1] * q * q / r - dd * w * w - 1.0, std::hypot(1.0, q)};
  };
  auto jac = [&p](double r, const nm::State<3>& y) {
    const double u = y[0], V = y[1];
    const double d = p.dphi_fn(u), dd = p.ddphi_fn(u);
    double ddd;
    if (p.dddphi_fn) {
      ddd = p.dddphi_fn(u);
    } else {
      const double e = 1e-6 * std::max(1.0, std::abs(u));
      ddd = (p.ddphi_fn(u + e) - p.ddphi_fn(u - e)) / (2 * e);
    }
    const double w = r + V, q = d * w, hq = q / std::hypot(1.0, q);
    std::array<nm::State<3>, 3> J{};
    J[0] = {dd * w, d, 0.0};
    J[1] = {-2 * V * q * dd * w / r - ddd * w * w,
            -1 / r - q * q / r - 2 * V * q * d / r - 2 * dd * w, 0.0};
    J[2] = {hq * dd * w, hq * d, 0.0};
    return J;
  };
  auto slope = [&p](double r, const nm::State<3>& y) { return p.dphi_fn(y[0]) * (r + y[1]); };
  nm::OdeOptions<3> opts;
  opts.rtol = o.tol;
  opts.atol = {o.tol, v_atol, o.tol};
  opts.h_max = std::min(o.max_step, 0.25);
  opts.h_init = std::min(opts.h_max, 1e-3 * std::max(1.0, r0));
  opts.h_min = 1e-14 * std::max(1.0, o.r_max);
  if (!(o.r_max > r0)) return;

  std::vector<nm::StepRecord<3>> steps;
  bool blown = false;
  auto observe = [&](const nm::StepRecord<3>& rec) {
    steps.push_back(rec);
    const double r = rec.t1;
    const auto& y = rec.y1;
    const double d = p.dphi_fn(y[0]);
    const double q = d * (r + y[1]);
    const double h = std::hypot(1.0, q);
    RotSample smp;
    smp.s = y[2];
    smp.x = r;
    smp.z = y[0];
    smp.theta = std::atan(q);
    smp.slope = q;
    smp.v1 = y[1];
    smp.kappa = -d * y[1] / (r * h);
    smp.ddu = smp.kappa * h * h * h;
    c.samples.push_back(smp);
    if (std::abs(q) > o.slope_cap) return !(blown = true);
    return true;
  };
  const nm::OdeStats st = nm::Radau5<3>(rhs, opts, jac).integrate(r0, y0, o.r_max, observe);
  if (blown) {
    double xs[3];
    for (int j = 0; j < 3; ++j) {
      const double level = o.slope_cap * std::pow(10.0, j - 2);
      auto it = std::find_if(steps.begin(), steps.end(), [&](const auto& rec) {
        return std::abs(slope(rec.t1, rec.y1)) >= level;
      });
      double lo = it->t0, hi = it->t1;
      if (std::abs(slope(it->t0, it->y0)) >= level) {
        xs[j] = lo;
        continue;
      }
      for (int k = 0; k < 100 && hi - lo > 1e-16 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(slope(mid, nm::hermite_state(*it, mid))) >= level ? hi : lo) = mid;
      }
      xs[j] = 0.5 * (lo + hi);
    }
    c.blown_up = true;
    c.omega_est = std::max(aitken(xs), c.samples.back().x);
    std::ostringstream os;
    os << "slope exceeded " << o.slope_cap << " at r=" << c.samples.back().x;
    c.diagnostic = os.str();
  } else if (st.status != nm::OdeStatus::reached_end) {
    std::ostringstream os;
    os << "far field stopped at r=" << st.t_final << " ("
       << (st.status == nm::OdeStatus::step_underflow ? "step underflow" : "failure") << ")";
    c.diagnostic = os.str();
  }
}

// Arc-length system over s: state (x, z, theta).
nm::Dopri5<3> arc_integrator(const PhiProfile& p, const RotationalOptions& o) {
  auto rhs = [&p](double, const nm::State<3>& y) -> nm::State<3> {
    if (!(y[0] > 0) || !p.in_domain(y[1])) return {NAN, NAN, NAN};
    const double c = std::cos(y[2]), s = std::sin(y[2]);
    return {c, s, p.dphi_fn(y[1]) * c - s / y[0]};
  };
  nm::OdeOptions<3> opts;
  opts.rtol = o.tol;
  opts.atol = {o.tol, o.tol, o.tol};
  opts.h_max = std::min(o.max_step, 0.02);
  opts.h_init = 1e-4;
  opts.h_min = 1e-14;
  return nm::Dopri5<3>(rhs, opts);
}

double theta_prime(const PhiProfile& p, const nm::State<3>& y) {
  return p.dphi_fn(y[1]) * std::cos(y[2]) - std::sin(y[2]) / y[0];
}

// d/ds of theta_prime along the arc-length system
double theta_second(const PhiProfile& p, const nm::State<3>& y) {
  const double c = std::cos(y[2]), s = std::sin(y[2]), k = theta_prime(p, y);
  return p.ddphi_fn(y[1]) * s * c - p.dphi_fn(y[1]) * s * k - c * k / y[0] + s * c / (y[0] * y[0]);
}

}  // namespace

std::string rot_kind_name(RotKind k) {
  switch (k) {
    case RotKind::bowl: return "bowl";
    case RotKind::catenoid_right: return "catenoid_right";
    case RotKind::catenoid_left: return "catenoid_left";
  }
  return "?";
}

std::string omega_name(OmegaClass k) {
  switch (k) {
    case OmegaClass::infinite: return "infinite";
    case OmegaClass::finite: return "finite";
    case OmegaClass::undetermined: return "undetermined";
  }
  return "?";
}

void RotationalCurve::finalize() {
  std::vector<double> x, z, zs, dq;
  for (std::size_t i = graph_start; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.ddu) || (!x.empty() && !(s.x > x.back()))) continue;
    x.push_back(s.x);
    z.push_back(s.z);
    zs.push_back(s.slope);
    dq.push_back(s.ddu);
  }
  if (x.size() < 2) return;
  u_spline_ = nm::HermiteSpline(x, z, zs, dq);
}

double RotationalCurve::u_at(double r) const {
  if (u_spline_.empty()) throw std::out_of_range("curve has no graph part");
  return u_spline_(r);
}

double RotationalCurve::slope_at(double r) const {
  if (u_spline_.empty()) throw std::out_of_range("curve has no graph part");
  return u_spline_.derivative(r);
}

RotationalCurve solve_bowl(const PhiProfile& p, double z0, double r_max, double tol) {
  RotationalOptions o;
  o.r_max = r_max;
  o.tol = tol;
  return solve_bowl(p, z0, o);
}

RotationalCurve solve_bowl(const PhiProfile& p, double z0, const RotationalOptions& o) {
  require_bowl_profile(p, z0, "solve_bowl");
  if (!(o.tol > 0) || !(o.r_max > 0)) throw std::invalid_argument("solve_bowl: need tol > 0, r_max > 0");
  RotationalCurve c;
  c.kind = RotKind::bowl;
  c.z0 = z0;
  c.x0 = 0;

  const double pd = p.dphi(z0), qd = p.ddphi(z0);
  const double a = pd / 4, b = qd * pd / 64 + pd * pd * pd / 128;
  c.samples.push_back(graph_sample(p, 0.0, 0.0, z0, 0.0, pd / 2, 0.0));

  // Taylor seed off the axis
  const double h0 = std::min(o.r_max, std::pow(o.tol, 0.25) * std::max(1.0, 1.0 / pd));
  const double u1 = z0 + a * h0 * h0 + b * std::pow(h0, 4);
  const double q1 = 2 * a * h0 + 4 * b * h0 * h0 * h0;
  const double s1 = h0 + (2.0 / 3.0) * a * a * h0 * h0 * h0;
  auto ddu_graph = [&p](double r, double u, double q) { return (1 + q * q) * (p.dphi(u) - q / r); };
  c.samples.push_back(graph_sample(p, s1, h0, u1, q1, ddu_graph(h0, u1, q1), q1 / p.dphi(u1) - h0));
  if (h0 >= o.r_max) {
    c.finalize();
    return c;
  }

  auto rhs = [&p](double r, const nm::State<3>& y) -> nm::State<3> {
    if (!p.in_domain(y[0])) return {NAN, NAN, NAN};
    return {y[1], (1 + y[1] * y[1]) * (p.dphi_fn(y[0]) - y[1] / r), std::sqrt(1 + y[1] * y[1])};
  };
  nm::OdeOptions<3> opts;
  opts.rtol = o.tol;
  opts.atol = {o.tol, o.tol, o.tol};
  opts.h_max = std::min(o.max_step, 0.05);
  opts.h_init = h0 / 4;
  opts.h_min = 1e-14 * std::max(1.0, o.r_max);
  nm::State<3> last{u1, q1, s1};
  double r_last = h0;
  bool switch_far = false;
  auto observe = [&](const nm::StepRecord<3>& rec) {
    const auto& y = rec.y1;
    c.samples.push_back(graph_sample(p, y[2], rec.t1, y[0], y[1], ddu_graph(rec.t1, y[0], y[1]),
                                     y[1] / p.dphi(y[0]) - rec.t1));
    last = y;
    r_last = rec.t1;
    if (y[1] > 1.0) return !(switch_far = true);
    return true;
  };
  const nm::OdeStats st = nm::Dopri5<3>(rhs, opts).integrate(h0, last, o.r_max, observe);
  if (switch_far) {
    const double v = last[1] / p.dphi(last[0]) - r_last;
    far_field(p, r_last, {last[0], v, last[2]}, 1e-300, o, c);
  } else if (st.status != nm::OdeStatus::reached_end) {
    std::ostringstream os;
    os << "near field stopped at r=" << st.t_final;
    c.diagnostic = os.str();
  }
  c.finalize();
  return c;
}

RotationalCurve solve_graph_ivp(const PhiProfile& p, double r0, double z0, double slope0,
                                double r_max, double stop_slope, double tol) {
  if (!(r0 > 0)) throw std::invalid_argument("solve_graph_ivp: r0 must be positive");
  RotationalCurve c;
  c.kind = RotKind::catenoid_right;
  c.z0 = z0;
  c.x0 = r0;
  auto ddu_graph = [&p](double r, double u, double q) { return (1 + q * q) * (p.dphi(u) - q / r); };
  c.samples.push_back(graph_sample(p, 0.0, r0, z0, slope0, ddu_graph(r0, z0, slope0),
                                   slope0 / p.dphi(z0) - r0));
  auto rhs = [&p](double r, const nm::State<3>& y) -> nm::State<3> {
    if (!p.in_domain(y[0])) return {NAN, NAN, NAN};
    return {y[1], (1 + y[1] * y[1]) * (p.dphi_fn(y[0]) - y[1] / r), std::sqrt(1 + y[1] * y[1])};
  };
  nm::OdeOptions<3> opts;
  opts.rtol = tol;
  opts.atol = {tol, tol, tol};
  opts.h_max = 0.05;
  opts.h_init = 1e-4;
  opts.h_min = 1e-14 * std::max(1.0, r_max);
  auto observe = [&](const nm::StepRecord<3>& rec) {
    const auto& y = rec.y1;
    c.samples.push_back(graph_sample(p, y[2], rec.t1, y[0], y[1], ddu_graph(rec.t1, y[0], y[1]),
                                     y[1] / p.dphi(y[0]) - rec.t1));
    return std::abs(y[1]) <= stop_slope;
  };
  nm::Dopri5<3>(rhs, opts).integrate(r0, {z0, slope0, 0.0}, r_max, observe);
  c.finalize();
  return c;
}

CatenoidPair solve_catenoid(const PhiProfile& p, double x0, double z0, double tol, double r_max) {
  RotationalOptions o;
  o.tol = tol;
  o.r_max = r_max;
  return solve_catenoid(p, x0, z0, o);
}

CatenoidPair solve_catenoid(const PhiProfile& p, double x0, double z0, const RotationalOptions& o) {
  if (!(x0 > 0)) throw std::invalid_argument("solve_catenoid: x0 must be positive");
  require_bowl_profile(p, z0, "solve_catenoid");
  CatenoidPair out;
  out.x0 = x0;
  const auto arc = arc_integrator(p, o);
  const double s_cap = 100.0 * (1.0 + x0);

  // right branch: theta from 0 up to pi/4, then graph far field
  {
    RotationalCurve& c = out.right;
    c.kind = RotKind::catenoid_right;
    c.x0 = x0;
    c.z0 = z0;
    c.samples.push_back(arc_sample(p, 0.0, x0, z0, 0.0));
    nm::State<3> last{x0, z0, 0.0};
    double s_last = 0;
    bool ready = false;
    auto observe = [&](const nm::StepRecord<3>& rec) {
      c.samples.push_back(arc_sample(p, rec.t1, rec.y1[0], rec.y1[1], rec.y1[2]));
      last = rec.y1;
      s_last = rec.t1;
      if (rec.y1[2] >= M_PI / 4 || rec.y1[0] >= o.r_max) return !(ready = true);
      return true;
    };
    arc.integrate(0.0, last, s_cap, observe);
    if (ready && last[0] < o.r_max) {
      c.graph_start = c.samples.size() - 1;
      const double q = std::tan(last[2]);
      far_field(p, last[0], {last[1], q / p.dphi(last[1]) - last[0], s_last}, o.tol, o, c);
    } else if (!ready) {
      c.diagnostic = "right branch did not turn to slope 1";
    }
    c.finalize();
  }

  // left branch: theta from pi through pi/2 to its minimum, then graph far field
  double neck_x = kInf;
  {
    RotationalCurve& c = out.left;
    c.kind = RotKind::catenoid_left;
    c.x0 = x0;
    c.z0 = z0;
    c.samples.push_back(arc_sample(p, 0.0, x0, z0, M_PI));
    nm::State<3> last{x0, z0, M_PI};
    double s_last = 0, tp_prev = theta_prime(p, last);
    bool ready = false;
    auto observe = [&](const nm::StepRecord<3>& rec) {
      const auto& y = rec.y1;
      c.samples.push_back(arc_sample(p, rec.t1, y[0], y[1], y[2]));
      if (!c.markers.s_half && rec.y0[2] > M_PI / 2 && y[2] <= M_PI / 2) {
        double lo = rec.t0, hi = rec.t1;
        for (int k = 0; k < 100 && hi - lo > 1e-15 * std::max(1.0, hi); ++k) {
          const double mid = 0.5 * (lo + hi);
          (nm::hermite(rec, 2, mid) <= M_PI / 2 ? hi : lo) = mid;
        }
        c.markers.s_half = 0.5 * (lo + hi);
        neck_x = nm::hermite(rec, 0, *c.markers.s_half);  // x' = cos(theta) vanishes here
      }
      const double tp = theta_prime(p, y);
      if (c.markers.s_half && !c.markers.s_min && tp_prev < 0 && tp >= 0) {
        // root of the cubic Hermite interpolant of theta' (slopes theta'')
        nm::StepRecord<1> k;
        k.t0 = rec.t0;
        k.t1 = rec.t1;
        k.y0 = {tp_prev};
        k.y1 = {tp};
        k.f0 = {theta_second(p, rec.y0)};
        k.f1 = {theta_second(p, y)};
        double lo = rec.t0, hi = rec.t1;
        for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          (nm::hermite(k, 0, mid) >= 0 ? hi : lo) = mid;
        }
        c.markers.s_min = 0.5 * (lo + hi);
      }
      tp_prev = tp;
      last = y;
      s_last = rec.t1;
      if (c.markers.s_min && tp > 0 && std::cos(y[2]) > 0) return !(ready = true);
      return true;
    };
    const nm::OdeStats st = arc.integrate(0.0, last, s_cap, observe);
    if (ready) {
      c.graph_start = c.samples.size() - 1;
      const double q = std::tan(last[2]);
      far_field(p, last[0], {last[1], q / p.dphi(last[1]) - last[0], s_last}, o.tol, o, c);
    } else {
      std::ostringstream os;
      os << "left branch stopped at s=" << st.t_final << " before its angle minimum";
      c.diagnostic = os.str();
      c.graph_start = c.samples.size();
    }
    c.finalize();
  }

  double mx = neck_x;
  for (const auto* b : {&out.left, &out.right})
    for (const auto& s : b->samples) mx = std::min(mx, s.x);
  out.neck_min_x = mx;
  return out;
}

CompareResult compare_profiles(const PhiProfile& p1, const PhiProfile& p2, double z0, double r_max,
                               double tol) {
  const RotationalCurve c1 = solve_bowl(p1, z0, r_max, tol);
  const RotationalCurve c2 = solve_bowl(p2, z0, r_max, tol);
  CompareResult res;
  res.r0 = std::min(c1.r_max(), c2.r_max());
  double z_hi = z0;
  for (const auto* c : {&c1, &c2})
    for (const auto& s : c->samples)
      if (s.x <= res.r0) z_hi = std::max(z_hi, s.z);
  for (int i = 0; i <= 1000; ++i) {
    const double z = z0 + (z_hi - z0) * i / 1000.0;
    if (!(p1.dphi(z) > p2.dphi(z))) {
      std::ostringstream os;
      os.precision(17);
      os << "compare_profiles: dphi1 > dphi2 fails at height " << z;
      throw PreconditionError(os.str(), z);
    }
  }
  res.dominates = true;
  res.min_margin = kInf;
  auto visit = [&](const RotationalCurve& own, const RotationalCurve& other, double sign) {
    for (const auto& s : own.samples) {
      if (!(s.x > 0) || s.x > res.r0) continue;
      const double m = sign * (s.slope - other.slope_at(s.x));
      res.min_margin = std::min(res.min_margin, m);
      res.dominates = res.dominates && m > 0;
      ++res.points;
    }
  };
  visit(c1, c2, 1.0);
  visit(c2, c1, -1.0);
  return res;
}

SlopeBoundResult slope_lower_bound_check(const PhiProfile& p, const RotationalCurve& c, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("slope_lower_bound_check: alpha must be positive");
  if (c.r_max() < 2 / alpha) throw std::invalid_argument("slope_lower_bound_check: curve too short");
  for (std::size_t i = c.graph_start; i < c.samples.size(); ++i)
    if (!(p.dphi(c.samples[i].z) > alpha))
      throw PreconditionError("slope_lower_bound_check: dphi <= alpha on the curve", c.samples[i].z);
  SlopeBoundResult r;
  for (std::size_t i = c.samples.size(); i-- > c.graph_start;) {
    const auto& s = c.samples[i];
    if (!(s.x > 0)) break;
    if (!(s.slope >= alpha * s.x - 1 / (alpha * s.x))) break;
    r.holds = true;
    r.r_check = s.x;
  }
  return r;
}

OmegaResult classify_omega(const PhiProfile& p, const RotationalCurve& c) {
  OmegaResult r;
  GrowthReport g;
  try {
    g = growth_classify(p);
  } catch (const std::exception&) {
    return r;
  }
  switch (g.kind) {
    case GrowthClass::at_most_linear:
    case GrowthClass::quadratic_growth:
      r.kind = OmegaClass::infinite;
      break;
    case GrowthClass::power_alpha_gt1:
      if (c.blown_up) {
        r.kind = OmegaClass::finite;
        r.radius = c.omega_est;
      }
      break;
    case GrowthClass::undetermined:
      break;
  }
  return r;
}

}  // namespace phimin
