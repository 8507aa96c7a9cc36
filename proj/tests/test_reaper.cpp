#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phimin/reaper.hpp"

#include <cmath>

using namespace phimin;

namespace {

template <class F>
double sup_error(const ReaperCurve& c, double x_lim, F exact, int n = 2000) {
  double e = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = x_lim * (2.0 * i / n - 1);
    e = std::max(e, std::abs(c.u_at(x) - exact(x)));
  }
  return e;
}

// Gamma(1/4)^2 / (4 sqrt(2 pi)) = int_1^inf du / sqrt(u^4 - 1)
constexpr double kLemniscateHalf = 1.3110287771460599052;

}  // namespace

TEST_CASE("soliton reaper is -log cos x, shifted by u0") {
  const auto p = make_preset(PresetKind::soliton);
  for (double u0 : {0.0, 3.0}) {
    const auto c = solve_reaper_ivp(p, u0, 1.4);
    CHECK(sup_error(c, 1.4, [u0](double x) { return u0 - std::log(std::cos(x)); }) <= 1e-8);
    CHECK(std::abs(lambda_estimate(p, u0) - M_PI / 2) <= 1e-6);
  }
}

TEST_CASE("soliton reaper run to blow-up locates the asymptote") {
  const auto p = make_preset(PresetKind::soliton);
  const auto c = solve_reaper_ivp(p, 0.0, 3.0);
  CHECK(c.endpoint == Endpoint::vertical_asymptotes);
  CHECK(std::abs(c.lambda_est - M_PI / 2) <= 1e-6);
  CHECK(c.x_max() < M_PI / 2);
}

TEST_CASE("singular minimal reapers are catenaries a cosh(x/a)") {
  const auto p = make_preset(PresetKind::singular_log, {1.0});
  for (double a : {1.0, 2.0}) {
    const auto c = solve_reaper_ivp(p, a, 2.0);
    CHECK(sup_error(c, 2.0, [a](double x) { return a * std::cosh(x / a); }) <= 1e-8 * a * std::cosh(2.0 / a));
    CHECK_FALSE(lambda_finite(p, a));
  }
  const auto c = solve_reaper_ivp(p, 1.0, 2.0);
  CHECK(c.endpoint == Endpoint::entire);
  CHECK(std::isinf(c.lambda_est));
}

TEST_CASE("phi = 2 log u: half-width is the lemniscate integral") {
  // u^2 / sqrt(1 + u'^2) = 1 gives u' = sqrt(u^4 - 1).
  const auto p = make_preset(PresetKind::singular_log, {2.0});
  CHECK(std::abs(lambda_estimate(p, 1.0) - kLemniscateHalf) <= 1e-8);
  CHECK(lambda_finite(p, 1.0));
  const auto c = solve_reaper_ivp(p, 1.0, 2.0);
  CHECK(c.endpoint == Endpoint::vertical_asymptotes);
  CHECK(std::abs(c.lambda_est - kLemniscateHalf) <= 1e-6);
}

TEST_CASE("decreasing profile: phi = -log u gives a circular arc reaching u = 0") {
  const auto p = make_preset(PresetKind::singular_log, {-1.0});
  const auto c = solve_reaper_ivp(p, 2.0, 3.0);
  CHECK(c.endpoint == Endpoint::reaches_domain_edge);
  CHECK(std::abs(c.lambda_est - 2.0) <= 1e-6);
  CHECK(sup_error(c, 1.8, [](double x) { return std::sqrt(4 - x * x); }) <= 1e-8);
  const auto e = endpoint_behavior(p, 2.0);
  CHECK(e.kind == Endpoint::reaches_domain_edge);
  CHECK(e.theorem_case == "decreasing_profile");
  CHECK(std::abs(e.lambda - 2.0) <= 1e-6);
}

TEST_CASE("arctan profile: finite limiting slope from the conserved quantity") {
  // e^{phi} / sqrt(1 + u'^2) is constant and phi runs from 0 to pi/2.
  const auto p = make_preset(PresetKind::arctan);
  const auto e = endpoint_behavior(p, 0.0);
  CHECK(e.kind == Endpoint::finite_slope_infinite_height);
  CHECK(std::isinf(e.lambda));
  CHECK(e.limit_slope == doctest::Approx(std::sqrt(std::expm1(M_PI))).epsilon(1e-12));
  CHECK(e.limit_slope == doctest::Approx(4.70539).epsilon(1e-5));
  const auto c = solve_reaper_ivp(p, 0.0, 200.0);
  const double s_end = c.samples.back().du;
  CHECK(s_end < e.limit_slope);
  CHECK(s_end > 0.95 * e.limit_slope);
}

TEST_CASE("finiteness table and trend") {
  CHECK(lambda_finite(make_preset(PresetKind::soliton), 0.0));
  CHECK_FALSE(lambda_finite(make_preset(PresetKind::singular_log, {1.0}), 1.0));
  CHECK(lambda_finite(make_preset(PresetKind::singular_log, {2.0}), 1.0));
  // phi = 2 log u is scale invariant: Lambda(u0) = u0 * Lambda(1), increasing in u0
  const auto f = lambda_finiteness(make_preset(PresetKind::singular_log, {2.0}), 1.0);
  CHECK(f.finite);
  CHECK(f.trend_in_u0 == 1);
  CHECK(lambda_estimate(make_preset(PresetKind::singular_log, {2.0}), 3.0) ==
        doctest::Approx(3 * kLemniscateHalf).epsilon(1e-8));
}

TEST_CASE("quadrature branch: X(log 2) = pi/3 for the soliton") {
  // x = arccos(e^{-z}) for u = -log cos x
  const auto p = make_preset(PresetKind::soliton);
  const auto c = reaper_quadrature(p, 0.0, {0.1, std::log(2.0), 1.0, 2.0});
  bool found = false;
  for (const auto& s : c.samples)
    if (std::abs(s.u - std::log(2.0)) < 1e-12) {
      CHECK(std::abs(s.x - M_PI / 3) <= 1e-10);
      found = true;
    }
  CHECK(found);
  for (const auto& s : c.samples)
    if (s.x > 0) CHECK(std::abs(s.x - std::acos(std::exp(-s.u))) <= 1e-10);
}

TEST_CASE("phase invariant is conserved") {
  for (const char* spec : {"soliton", "singular_log:1", "quadratic:1,1", "arctan"}) {
    const auto p = parse_profile(spec);
    const double u0 = std::string(spec) == "singular_log:1" ? 1.0 : 0.0;
    const auto c = solve_reaper_ivp(p, u0, 1.2);
    CHECK(phase_invariant_drift(c, p) <= 1e-8);
  }
}

TEST_CASE("curve symmetry and second derivative") {
  const auto p = make_preset(PresetKind::soliton);
  const auto c = solve_reaper_ivp(p, 0.0, 1.4);
  CHECK(c.u_at(-0.7) == c.u_at(0.7));
  CHECK(c.du_at(-0.7) == -c.du_at(0.7));
  const double x = 0.9;
  CHECK(c.ddu_at(x) == doctest::Approx(1 / (std::cos(x) * std::cos(x))).epsilon(1e-8));
}

TEST_CASE("tilted soliton reaper") {
  const auto p = make_preset(PresetKind::soliton);
  const auto c = solve_reaper_ivp(p, 0.0, 1.5);
  const auto t = tilt_reaper(c, p, M_PI / 4);
  CHECK(t.half_width() == doctest::Approx(M_PI / 2 * std::sqrt(2.0)).epsilon(1e-6));
  const double x = 0.8, y = -0.3, k = std::cos(M_PI / 4);
  CHECK(t.graph(x, y) == doctest::Approx(-std::log(std::cos(x * k)) / (k * k) + y).epsilon(1e-9));
  CHECK_THROWS_AS(t.graph(2.5, 0), std::out_of_range);
  CHECK_THROWS_AS(tilt_reaper(c, p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(tilt_reaper(c, p, M_PI / 2), std::invalid_argument);
}

TEST_CASE("input errors") {
  CHECK_THROWS_AS(solve_reaper_ivp(make_preset(PresetKind::singular_log, {1.0}), -1.0, 1.0), DomainError);
  CHECK_THROWS(solve_reaper_ivp(make_preset(PresetKind::soliton), 0.0, -1.0));
}
