#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phimin/asymptotics.hpp"
#include "phimin/rotational.hpp"

#include <array>
#include <cmath>

using namespace phimin;

namespace {

// Independent oracle: classical RK4 with a fixed step on the graph form
// u'' = (1 + u'^2)(dphi(u) - u'/r), started from the series
// u = z0 + p r^2/4 + ..., u' = p r/2 + ... at r = r0.
struct Rk4Bowl {
  double u, du;
};

Rk4Bowl rk4_bowl(const PhiProfile& p, double z0, double r_end, double h = 2e-4) {
  const double a = p.dphi(z0);
  double r = 1e-3;
  double u = z0 + a / 4 * r * r, du = a / 2 * r;
  auto f = [&](double rr, double uu, double qq) { return (1 + qq * qq) * (p.dphi(uu) - qq / rr); };
  const int n = static_cast<int>(std::round((r_end - r) / h));
  const double hh = (r_end - r) / n;
  for (int i = 0; i < n; ++i) {
    const double k1u = du, k1q = f(r, u, du);
    const double k2u = du + hh / 2 * k1q, k2q = f(r + hh / 2, u + hh / 2 * k1u, du + hh / 2 * k1q);
    const double k3u = du + hh / 2 * k2q, k3q = f(r + hh / 2, u + hh / 2 * k2u, du + hh / 2 * k2q);
    const double k4u = du + hh * k3q, k4q = f(r + hh, u + hh * k3u, du + hh * k3q);
    u += hh / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    du += hh / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
    r += hh;
  }
  return {u, du};
}

// Same for the arc-length system of a profile curve.
std::array<double, 3> rk4_arc(const PhiProfile& p, double x, double z, double th, double s_end, double h = 1e-4) {
  auto f = [&](const std::array<double, 3>& y) {
    return std::array<double, 3>{std::cos(y[2]), std::sin(y[2]), p.dphi(y[1]) * std::cos(y[2]) - std::sin(y[2]) / y[0]};
  };
  std::array<double, 3> y{x, z, th};
  const int n = static_cast<int>(std::round(s_end / h));
  for (int i = 0; i < n; ++i) {
    auto add = [](std::array<double, 3> a, const std::array<double, 3>& b, double t) {
      for (int k = 0; k < 3; ++k) a[k] += t * b[k];
      return a;
    };
    const auto k1 = f(y), k2 = f(add(y, k1, h / 2)), k3 = f(add(y, k2, h / 2)), k4 = f(add(y, k3, h));
    for (int k = 0; k < 3; ++k) y[k] += h / 6 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
  }
  return y;
}

}  // namespace

TEST_CASE("soliton bowl against an independent RK4 integration") {
  const auto p = make_preset(PresetKind::soliton);
  const auto c = solve_bowl(p, 0.0, 5.0);
  const auto o = rk4_bowl(p, 0.0, 5.0);
  CHECK(std::abs(c.u_at(5.0) - o.u) <= 1e-8);
  CHECK(std::abs(c.slope_at(5.0) - o.du) <= 1e-8);
  const auto o2 = rk4_bowl(p, 0.0, 2.0);
  CHECK(std::abs(c.u_at(2.0) - o2.u) <= 1e-8);
}

TEST_CASE("bowls for other profiles against RK4") {
  for (const char* spec : {"quadratic:1,1", "ulogu"}) {
    const auto p = parse_profile(spec);
    const double z0 = std::string(spec) == "ulogu" ? 2.0 : 0.5;
    const auto c = solve_bowl(p, z0, 1.5);
    const auto o = rk4_bowl(p, z0, 1.5);
    CHECK(std::abs(c.u_at(1.5) - o.u) <= 1e-8 * std::max(1.0, std::abs(o.u)));
    CHECK(std::abs(c.slope_at(1.5) - o.du) <= 1e-7 * std::max(1.0, std::abs(o.du)));
  }
}

TEST_CASE("scaling: dphi = c gives u_c(r) = u_1(c r) / c") {
  const auto c1 = solve_bowl(make_preset(PresetKind::soliton), 0.0, 10.0);
  const auto c2 = solve_bowl(make_preset(PresetKind::quadratic, {0.0, 2.0}), 0.0, 5.0);
  for (double r : {0.3, 1.0, 2.5, 4.9}) CHECK(std::abs(c2.u_at(r) - c1.u_at(2 * r) / 2) <= 1e-8);
}

TEST_CASE("bowl is a convex increasing graph starting on the axis") {
  const auto c = solve_bowl(make_preset(PresetKind::soliton), 1.0, 10.0);
  CHECK(c.kind == RotKind::bowl);
  CHECK(c.samples.front().x == 0.0);
  CHECK(c.samples.front().z == 1.0);
  CHECK(c.r_max() == doctest::Approx(10.0));
  CHECK_FALSE(c.blown_up);
  double prev = -1;
  for (const auto& s : c.samples) {
    CHECK(s.slope >= prev);
    prev = s.slope;
  }
  CHECK(v1_violations(c) == 0);
}

TEST_CASE("profile preconditions for bowls") {
  CHECK_THROWS_AS(solve_bowl(make_preset(PresetKind::arctan), 0.0, 5.0), PreconditionError);
  CHECK_THROWS(solve_bowl(make_preset(PresetKind::singular_log, {-1.0}), 1.0, 5.0));
  CHECK_THROWS_AS(solve_bowl(make_preset(PresetKind::singular_log, {1.0}), -1.0, 5.0), DomainError);
}

TEST_CASE("catenoid branches: right against RK4, left turns back") {
  const auto p = make_preset(PresetKind::soliton);
  RotationalOptions o;
  o.r_max = 6;
  o.max_step = 0.01;
  const auto cat = solve_catenoid(p, 1.0, 0.0, o);
  // right branch in arc length up to s = 0.5 (before the switch to the graph form)
  const auto y = rk4_arc(p, 1.0, 0.0, 0.0, 0.5);
  bool compared = false;
  for (const auto& s : cat.right.samples)
    if (std::abs(s.s - 0.5) < 1e-12) {
      CHECK(std::abs(s.x - y[0]) <= 1e-8);
      CHECK(std::abs(s.z - y[1]) <= 1e-8);
      CHECK(std::abs(s.theta - y[2]) <= 1e-8);
      compared = true;
    }
  if (!compared) {
    // no sample exactly at 0.5: compare the nearest one with its own RK4 run
    const auto& s = cat.right.samples[3];
    const auto y3 = rk4_arc(p, 1.0, 0.0, 0.0, s.s, s.s / std::round(s.s / 1e-4));
    CHECK(std::abs(s.x - y3[0]) <= 1e-8);
    CHECK(std::abs(s.theta - y3[2]) <= 1e-8);
  }

  const auto& mk = cat.left.markers;
  REQUIRE(mk.s_half);
  REQUIRE(mk.s_min);
  CHECK(*mk.s_half < *mk.s_min);
  CHECK(*mk.s_half == doctest::Approx(0.854159).epsilon(1e-5));
  CHECK(std::abs(*mk.s_min - 1.7673248532514) <= 1e-7);  // independent DOP853 run, rtol 1e-13
  CHECK(std::abs(cat.neck_min_x - 0.379767572) <= 1e-7);
  // theta of the left branch at s_half, independently
  const auto yh = rk4_arc(p, 1.0, 0.0, M_PI, *mk.s_half, *mk.s_half / 8000);
  CHECK(std::abs(yh[2] - M_PI / 2) <= 1e-7);
  CHECK(cat.neck_min_x < cat.x0);
  CHECK(cat.neck_min_x > 0.3);
  CHECK(cat.left.r_max() == doctest::Approx(6.0));
}

TEST_CASE("graph IVP from a regular point reproduces the bowl") {
  const auto p = make_preset(PresetKind::soliton);
  const auto b = solve_bowl(p, 0.0, 6.0);
  const auto g = solve_graph_ivp(p, 2.0, b.u_at(2.0), b.slope_at(2.0), 6.0, 1e8);
  CHECK(std::abs(g.u_at(6.0) - b.u_at(6.0)) <= 1e-8);
}

TEST_CASE("comparison principle") {
  const auto p2 = make_preset(PresetKind::quadratic, {0.0, 2.0});
  const auto p1 = make_preset(PresetKind::soliton);
  const auto r = compare_profiles(p2, p1, 0.0, 5.0);
  CHECK(r.dominates);
  CHECK(r.min_margin > 0);
  CHECK(r.r0 == doctest::Approx(5.0));
  CHECK_THROWS_AS(compare_profiles(p1, p2, 0.0, 5.0), PreconditionError);
}

TEST_CASE("slope lower bound for dphi >= alpha") {
  const auto p = make_preset(PresetKind::quadratic, {0.0, 2.0});
  const auto c = solve_bowl(p, 0.0, 10.0);
  const auto r = slope_lower_bound_check(p, c, 1.9);
  CHECK(r.holds);
  CHECK(r.r_check < 10.0);
  CHECK_THROWS_AS(slope_lower_bound_check(p, c, 2.5), PreconditionError);
}

TEST_CASE("blow-up radius for dphi = u^2 is stable in the tolerance") {
  const auto p = make_preset(PresetKind::power, {2.0});
  RotationalOptions o;
  o.r_max = 10;
  o.tol = 1e-8;
  const auto a = solve_bowl(p, 1.0, o);
  o.tol = 1e-10;
  const auto b = solve_bowl(p, 1.0, o);
  const auto wa = classify_omega(p, a), wb = classify_omega(p, b);
  CHECK(wa.kind == OmegaClass::finite);
  CHECK(wb.kind == OmegaClass::finite);
  CHECK(std::abs(wa.radius - wb.radius) <= 0.01 * wb.radius);
  CHECK(wb.radius == doctest::Approx(1.822537).epsilon(1e-5));
  // u(r) at a radius inside the existence interval, against RK4
  const auto o1 = rk4_bowl(p, 1.0, 1.5, 1e-5);
  CHECK(std::abs(b.u_at(1.5) - o1.u) <= 1e-7 * std::abs(o1.u));
}

TEST_CASE("soliton bowl is entire") {
  const auto p = make_preset(PresetKind::soliton);
  const auto c = solve_bowl(p, 0.0, 1000.0);
  CHECK_FALSE(c.blown_up);
  CHECK(c.r_max() == doctest::Approx(1000.0));
  CHECK(classify_omega(p, c).kind == OmegaClass::infinite);
  // u ~ r^2/2 - log r far out
  const double r = 1000.0;
  CHECK(std::abs(c.u_at(r) - (r * r / 2 - std::log(r))) < 1.0);
}
