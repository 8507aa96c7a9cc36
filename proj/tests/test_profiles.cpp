#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phimin/profiles.hpp"

#include <cmath>

using namespace phimin;

namespace {

// Derivatives against central differences of the next-lower derivative.
void check_derivatives(const PhiProfile& p, const std::vector<double>& us) {
  for (double u : us) {
    const double h = 1e-5 * std::max(1.0, std::abs(u));
    const double d1 = (p.phi(u + h) - p.phi(u - h)) / (2 * h);
    const double d2 = (p.dphi(u + h) - p.dphi(u - h)) / (2 * h);
    CHECK(p.dphi(u) == doctest::Approx(d1).epsilon(1e-7));
    CHECK(p.ddphi(u) == doctest::Approx(d2).epsilon(1e-7).scale(1.0));
    if (p.has_dddphi()) {
      const double d3 = (p.ddphi(u + h) - p.ddphi(u - h)) / (2 * h);
      CHECK(*p.dddphi(u) == doctest::Approx(d3).epsilon(1e-6).scale(1.0));
    }
  }
}

}  // namespace

TEST_CASE("preset derivatives agree with finite differences") {
  check_derivatives(make_preset(PresetKind::soliton), {-3, 0.5, 7});
  check_derivatives(make_preset(PresetKind::singular_log, {1.0}), {0.3, 1, 4});
  check_derivatives(make_preset(PresetKind::singular_log, {-2.0}), {0.3, 1, 4});
  check_derivatives(make_preset(PresetKind::quadratic, {1.0, 0.5}), {-0.2, 1, 3});
  check_derivatives(make_preset(PresetKind::power, {2.0}), {0.3, 1, 2.5});
  check_derivatives(make_preset(PresetKind::ulogu), {1.2, 2, 9});
  check_derivatives(make_preset(PresetKind::arctan), {-1, 0, 2});
  check_derivatives(parse_profile("series:1,1,2,-1"), {2, 5});
  check_derivatives(parse_profile("poly:-1,0,1"), {1.5, 3});
}

TEST_CASE("closed forms") {
  const auto s = make_preset(PresetKind::soliton);
  CHECK(s.phi(2.5) == 2.5);
  CHECK(s.dphi(-7) == 1.0);
  const auto l = make_preset(PresetKind::singular_log, {2.0});
  CHECK(l.phi(std::exp(1.0)) == doctest::Approx(2.0));
  CHECK(l.dphi(4.0) == doctest::Approx(0.5));
  const auto a = make_preset(PresetKind::arctan);
  CHECK(a.phi(1.0) == doctest::Approx(M_PI / 4));
  const auto q = make_preset(PresetKind::quadratic, {2.0, 1.0});
  CHECK(q.dphi(3.0) == 7.0);
  CHECK(q.domain_lo == -0.5);  // dphi vanishes there
}

TEST_CASE("domain guard") {
  const auto l = make_preset(PresetKind::singular_log, {1.0});
  CHECK_THROWS_AS(l.phi(-1.0), DomainError);
  CHECK_THROWS_AS(l.dphi(0.0), DomainError);
  CHECK_FALSE(l.in_domain(0.0));
  CHECK(l.in_domain(1e-3));
  CHECK_THROWS_AS(make_preset(PresetKind::ulogu).dphi(0.5), DomainError);
}

TEST_CASE("parsing") {
  CHECK(parse_profile("soliton").dphi(3) == 1.0);
  CHECK(parse_profile("quadratic:0,2").dphi(10) == 2.0);
  CHECK(parse_profile("singular_log:-1").decreasing());
  CHECK(kind_name(parse_kind("ulogu")) == "ulogu");
  CHECK_THROWS(parse_profile("bogus"));
  CHECK_THROWS(parse_profile("singular_log:0"));
  CHECK_THROWS(parse_profile("quadratic:1,x"));
  CHECK_THROWS(parse_profile("series:1"));
  // the stored spec reproduces the profile
  const auto p = parse_profile("series:0,1,-1");
  const auto q = parse_profile(p.spec);
  CHECK(q.dphi(3.0) == p.dphi(3.0));
}

TEST_CASE("domains from roots of dphi") {
  CHECK(parse_profile("series:0,1,-1").domain_lo == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(parse_profile("poly:-1,0,1").domain_lo == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(parse_profile("poly:-4,0,1").domain_lo == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("validation report") {
  std::vector<double> grid;
  for (int k = 1; k <= 200; ++k) grid.push_back(0.05 * k);

  const auto s = validate_profile(make_preset(PresetKind::soliton), grid);
  CHECK(s.strictly_increasing);
  CHECK(s.convex);
  REQUIRE(s.lambda_witness);
  CHECK(*s.lambda_witness == std::ldexp(1.0, -20));
  REQUIRE(s.dddphi_nonpositive);
  CHECK(*s.dddphi_nonpositive);

  // ddphi + l dphi^2 = (l a^2 - a) / u^2 for phi = a log u, so l >= 1/a.
  const auto l1 = validate_profile(make_preset(PresetKind::singular_log, {1.0}), grid);
  CHECK(l1.strictly_increasing);
  CHECK_FALSE(l1.convex);
  REQUIRE(l1.lambda_witness);
  CHECK(*l1.lambda_witness == 1.0);
  const auto l2 = validate_profile(make_preset(PresetKind::singular_log, {2.0}), grid);
  REQUIRE(l2.lambda_witness);
  CHECK(*l2.lambda_witness == 0.5);

  const auto d = validate_profile(make_preset(PresetKind::singular_log, {-1.0}), grid);
  CHECK(d.strictly_decreasing);
  CHECK_FALSE(d.strictly_increasing);

  // deterministic
  CHECK(validate_profile(make_preset(PresetKind::arctan), grid) ==
        validate_profile(make_preset(PresetKind::arctan), grid));
}

TEST_CASE("reflection of a decreasing profile") {
  const auto p = make_preset(PresetKind::singular_log, {-1.0});
  const auto r = reflect(p);
  CHECK(r.increasing());
  CHECK(r.domain_hi == 0.0);
  CHECK(r.phi(-2.0) == doctest::Approx(p.phi(2.0)));
  CHECK(r.dphi(-2.0) == doctest::Approx(-p.dphi(2.0)));
  CHECK(r.ddphi(-2.0) == doctest::Approx(p.ddphi(2.0)));
  CHECK_THROWS_AS(r.phi(1.0), DomainError);
}

TEST_CASE("custom profiles infer monotonicity") {
  const auto c = make_custom([](double u) { return std::exp(u); }, [](double u) { return std::exp(u); },
                             [](double u) { return std::exp(u); }, {}, -kInf);
  CHECK(c.increasing());
  CHECK_FALSE(c.has_dddphi());
  const auto d = make_custom([](double u) { return -u * u * u; }, [](double u) { return -3 * u * u; },
                             [](double u) { return -6 * u; }, {}, 0.0);
  CHECK(d.decreasing());
}

TEST_CASE("growth classification") {
  CHECK(growth_classify(make_preset(PresetKind::soliton)).kind == GrowthClass::at_most_linear);
  CHECK(growth_classify(make_preset(PresetKind::singular_log, {1.0})).kind == GrowthClass::at_most_linear);
  CHECK(growth_classify(make_preset(PresetKind::quadratic, {1.0, 0.0})).kind == GrowthClass::quadratic_growth);
  const auto pw = growth_classify(make_preset(PresetKind::power, {2.0}));
  CHECK(pw.kind == GrowthClass::power_alpha_gt1);
  CHECK(pw.exponent == doctest::Approx(2.0).epsilon(1e-3));
  // u log u is neither linear nor a clean power law
  CHECK(growth_classify(make_preset(PresetKind::ulogu)).kind == GrowthClass::undetermined);
  CHECK(growth_name(GrowthClass::quadratic_growth) == "quadratic_growth");
}
