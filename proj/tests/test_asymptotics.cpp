#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phimin/asymptotics.hpp"

#include <cmath>

using namespace phimin;

namespace {

const SubCheck& sub(const AsymptoticReport& r, const std::string& name) {
  for (const auto& s : r.subchecks)
    if (s.name == name) return s;
  FAIL("missing subcheck " << name);
  throw std::logic_error("unreachable");
}

RotationalCurve bowl(const char* spec, double z0, double r_max, double slope_cap = 1e8) {
  RotationalOptions o;
  o.r_max = r_max;
  o.slope_cap = slope_cap;
  return solve_bowl(parse_profile(spec), z0, o);
}

}  // namespace

TEST_CASE("soliton expansion on synthetic data") {
  // u' = r - 1/r - 2/r^3 - 11/r^5 - ... integrates to
  // u = r^2/2 - log r + C + 1/r^2 + 11/(4 r^4) + ...
  std::vector<double> r, u;
  for (int i = 0; i <= 300; ++i) {
    const double x = 15 + 0.05 * i;
    r.push_back(x);
    u.push_back(x * x / 2 - std::log(x) - 0.4 + 1 / (x * x) + 2.75 / std::pow(x, 4));
  }
  const auto rep = check_soliton_expansion(r, u);
  CHECK(rep.verdict);
  CHECK(rep.fitted.at("d_bar") == doctest::Approx(-0.4).epsilon(1e-10));

  // an oscillating perturbation breaks both subchecks
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += 0.05 * std::sin(3 * r[i]);
  const auto bad = check_soliton_expansion(r, u);
  CHECK_FALSE(bad.verdict);
}

TEST_CASE("soliton bowl: expansion constant against an independent integration") {
  // DOP853 (scipy, rtol 1e-13) to r = 30, minus the known 1/r^2, r^-4, r^-6 terms
  const double d_bar = -0.6523164951072526;
  const auto c = bowl("soliton", 0.0, 30.0);
  const auto rep = check_soliton_expansion(c);
  CHECK(rep.verdict);
  CHECK(std::abs(rep.fitted.at("d_bar") - d_bar) <= 1e-5);
  CHECK(sub(rep, "additive_constant_fit").value <= 0.02);
  const auto& tr = sub(rep, "rescaled_residual_trend").trend;
  REQUIRE(tr.size() >= 2);
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] <= tr[i - 1]);
  CHECK(tr.back() == doctest::Approx(1.0).epsilon(0.01));  // r^2 (d - d_bar) -> 1
}

TEST_CASE("soliton expansion refuses reapers") {
  const auto p = make_preset(PresetKind::soliton);
  const auto c = solve_reaper_ivp(p, 0.0, 1.4);
  CHECK_THROWS_AS(check_soliton_expansion(c), std::invalid_argument);
}

TEST_CASE("alpha = 0: r (u'/dphi - r) -> -1/beta^2") {
  const auto p = make_preset(PresetKind::soliton);
  const auto rep = check_alpha_zero(p, bowl("soliton", 0.0, 30.0));
  CHECK(rep.verdict);
  CHECK(sub(rep, "rV_limit").value == doctest::Approx(-1.0).epsilon(0.05));

  // dphi = 2: u_2(r) = u_1(2r)/2, so r V -> -1/4
  const auto p2 = make_preset(PresetKind::quadratic, {0.0, 2.0});
  const auto rep2 = check_alpha_zero(p2, bowl("quadratic:0,2", 0.0, 30.0));
  CHECK(rep2.verdict);
  CHECK(sub(rep2, "rV_limit").value == doctest::Approx(-0.25).epsilon(0.05));
}

TEST_CASE("alpha = 0 with a 1/u correction converges slowly") {
  // dphi = 1 - 1/u from z0 = 2: 5 % off the limit at r = 15, inside it beyond r = 30
  const auto p = parse_profile("series:0,1,-1");
  const auto early = check_alpha_zero(p, bowl("series:0,1,-1", 2.0, 60.0));
  CHECK_FALSE(sub(early, "rV_limit").pass);
  CheckOptions late;
  late.r_lo = 30;
  late.r_hi = 60;
  const auto rep = check_alpha_zero(p, bowl("series:0,1,-1", 2.0, 60.0), late);
  CHECK(rep.verdict);
  CHECK(sub(rep, "G_derivative").value <= 1e-8);
}

TEST_CASE("alpha > 0: lambda -> -1 and log dphi ~ r^2/2") {
  const auto p = make_preset(PresetKind::quadratic, {1.0, 0.0});
  const auto rep = check_alpha_positive(p, bowl("quadratic:1,0", 1.0, 12.0, kInf));
  CHECK(rep.verdict);
  CHECK(sub(rep, "lambda_limit").value == doctest::Approx(-1.0).epsilon(0.10));
  CHECK(sub(rep, "log_dphi_ratio").value == doctest::Approx(1.0).epsilon(0.05));
  // the quasi-steady value -(1 + r^2)/r^2 at r = 12
  CHECK(sub(rep, "lambda_limit").value == doctest::Approx(-(1 + 144.0) / 144.0).epsilon(1e-3));
}

TEST_CASE("alpha > 0 series profile reports a positive constant") {
  const auto p = parse_profile("series:1,0,1");
  const auto rep = check_alpha_positive(p, bowl("series:1,0,1", 1.0, 12.0, kInf));
  CHECK(rep.verdict);
  CHECK(rep.fitted.at("C") > 0);
}

TEST_CASE("G integral closed forms") {
  const auto s = make_preset(PresetKind::soliton);
  CHECK(G_integral(s, 1.0, 4.0) == doctest::Approx(3.0).epsilon(1e-14));
  // dphi = 1 - 1/u: G = u + log(u - 1)
  const auto q = parse_profile("series:0,1,-1");
  const auto G = [](double u) { return u + std::log(u - 1); };
  CHECK(G_integral(q, 2.0, 7.0) == doctest::Approx(G(7.0) - G(2.0)).epsilon(1e-13));
}

TEST_CASE("end template on a revolved soliton bowl, and a shifted one") {
  const auto p = make_preset(PresetKind::soliton);
  const auto c = bowl("soliton", 0.0, 20.0);
  std::vector<std::array<double, 3>> pts, shifted;
  for (int i = 0; i <= 20; ++i)
    for (int k = 0; k < 24; ++k) {
      const double rho = 10 + 0.5 * i, t = 2 * M_PI * k / 24;
      pts.push_back({rho * std::cos(t), rho * std::sin(t), c.u_at(rho)});
      // same surface with its axis moved to x = 1
      const double xs = rho * std::cos(t) + 1, ys = rho * std::sin(t);
      shifted.push_back({xs, ys, c.u_at(rho)});
    }
  const auto rep = match_end_template(pts, p);
  CHECK(rep.verdict);
  CHECK(rep.residual_sup <= 0.02);
  const auto bad = match_end_template(shifted, p);
  CHECK_FALSE(bad.verdict);
  CHECK(bad.residual_sup > 0.1);
}

TEST_CASE("template preconditions") {
  const auto p = make_preset(PresetKind::soliton);
  std::vector<std::array<double, 3>> thin;
  for (int k = 0; k < 32; ++k) thin.push_back({10 * std::cos(k * 0.2), 10 * std::sin(k * 0.2), 50.0});
  CHECK_THROWS_AS(match_end_template(thin, p), std::invalid_argument);
  CHECK_THROWS_AS(match_end_template(thin, make_preset(PresetKind::arctan)), std::invalid_argument);
}

TEST_CASE("v1 is negative along bowls") {
  CHECK(v1_violations(bowl("soliton", 0.0, 30.0)) == 0);
  CHECK(v1_violations(bowl("quadratic:1,1", 0.0, 5.0)) == 0);
}
