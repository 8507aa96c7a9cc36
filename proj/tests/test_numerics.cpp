#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phimin/numerics/interp.hpp"
#include "phimin/numerics/ode.hpp"
#include "phimin/numerics/quadrature.hpp"

#include <cmath>

using namespace phimin::numerics;

TEST_CASE("quadrature: smooth integrands") {
  CHECK(integrate([](double x) { return x * x; }, 0, 1).value == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::sin(x); }, 0, M_PI).value == doctest::Approx(2.0).epsilon(1e-14));
  const auto r = integrate([](double x) { return std::exp(-x * x); }, -5, 5);
  CHECK(r.converged);
  CHECK(std::abs(r.value - std::sqrt(M_PI) * std::erf(5.0)) < 1e-13);
}

TEST_CASE("quadrature: integrable endpoint singularity") {
  const auto r = integrate([](double x) { return 1 / std::sqrt(x); }, 0, 1);
  CHECK(std::abs(r.value - 2.0) < 1e-9);
  const auto l = integrate([](double x) { return std::log(x); }, 0, 1);
  CHECK(std::abs(l.value + 1.0) < 1e-10);
}

TEST_CASE("quadrature: single panel is exact for low-degree polynomials") {
  double err = 1;
  const double v = gauss_kronrod15([](double x) { return std::pow(x, 9) - 3 * x * x; }, -1, 2, err);
  CHECK(std::abs(v - ((std::pow(2.0, 10) - 1) / 10 - 9)) < 1e-11);
  CHECK(err < 1e-10);
}

TEST_CASE("dopri5: exponential decay and stop by observer") {
  OdeOptions<2> o;
  o.rtol = 1e-11;
  o.atol = {1e-14, 1e-14};
  Dopri5<2> ode([](double, const State<2>& y) { return State<2>{-y[0], y[0] - y[1]}; }, o);
  State<2> last{};
  const auto st = ode.integrate(0, {1, 0}, 1, [&](const StepRecord<2>& s) {
    last = s.y1;
    return true;
  });
  CHECK(st.status == OdeStatus::reached_end);
  CHECK(std::abs(last[0] - std::exp(-1.0)) < 1e-10);
  CHECK(std::abs(last[1] - std::exp(-1.0)) < 1e-10);  // y1 = t e^{-t}

  const auto st2 = ode.integrate(0, {1, 0}, 10, [](const StepRecord<2>& s) { return s.t1 < 2; });
  CHECK(st2.status == OdeStatus::stopped);
  CHECK(st2.t_final >= 2);
  CHECK(st2.t_final < 10);
}

TEST_CASE("dopri5: harmonic oscillator and dense output") {
  OdeOptions<2> o;
  o.rtol = 1e-12;
  o.atol = {1e-14, 1e-14};
  Dopri5<2> ode([](double, const State<2>& y) { return State<2>{y[1], -y[0]}; }, o);
  double worst = 0;
  ode.integrate(0, {0, 1}, 10, [&](const StepRecord<2>& s) {
    const double tm = 0.5 * (s.t0 + s.t1);
    const double h = s.t1 - s.t0;
    // cubic Hermite error is O(h^4) with unit derivatives
    worst = std::max(worst, std::abs(hermite(s, 0, tm) - std::sin(tm)) - h * h * h * h / 384);
    return true;
  });
  CHECK(worst < 1e-9);
}

TEST_CASE("dopri5: blow-up is reported, not hidden") {
  OdeOptions<2> o;
  o.h_min = 1e-14;
  Dopri5<2> ode([](double, const State<2>& y) { return State<2>{y[0] * y[0], 0}; }, o);
  const auto st = ode.integrate(0, {1, 0}, 2, [](const StepRecord<2>&) { return true; });
  CHECK(st.status != OdeStatus::reached_end);
  CHECK(st.t_final < 1.0);
  CHECK(st.t_final > 0.99);
}

TEST_CASE("radau5: stiff relaxation towards cos t") {
  OdeOptions<3> o;
  o.rtol = 1e-9;
  o.atol = {1e-12, 1e-12, 1e-12};
  const double k = 1e4;
  Radau5<3> ode(
      [k](double t, const State<3>& y) {
        return State<3>{-k * (y[0] - std::cos(t)) - std::sin(t), y[2], -y[1]};
      },
      o,
      [k](double, const State<3>&) {
        return std::array<State<3>, 3>{State<3>{-k, 0, 0}, State<3>{0, 0, 1}, State<3>{0, -1, 0}};
      });
  State<3> last{};
  const auto st = ode.integrate(0, {1, 0, 1}, 3, [&](const StepRecord<3>& s) {
    last = s.y1;
    return true;
  });
  CHECK(st.status == OdeStatus::reached_end);
  CHECK(std::abs(last[0] - std::cos(3.0)) < 1e-8);
  CHECK(std::abs(last[1] - std::sin(3.0)) < 1e-7);
  CHECK(st.accepted < 2000);  // an explicit method would need ~ k * 3 steps
}

TEST_CASE("radau5: finite-difference Jacobian fallback") {
  OdeOptions<3> o;
  o.rtol = 1e-9;
  o.atol = {1e-12, 1e-12, 1e-12};
  Radau5<3> ode([](double, const State<3>& y) { return State<3>{-2 * y[0], -y[1], 0}; }, o);
  State<3> last{};
  ode.integrate(0, {1, 1, 5}, 1, [&](const StepRecord<3>& s) {
    last = s.y1;
    return true;
  });
  CHECK(std::abs(last[0] - std::exp(-2.0)) < 1e-8);
  CHECK(std::abs(last[1] - std::exp(-1.0)) < 1e-8);
  CHECK(last[2] == 5.0);
}

TEST_CASE("hermite spline reproduces cubics and rejects extrapolation") {
  std::vector<double> x, y, d;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.3 * i;
    x.push_back(t);
    y.push_back(t * t * t - t);
    d.push_back(3 * t * t - 1);
  }
  HermiteSpline s(x, y, d, false);
  for (double t : {0.05, 0.77, 1.5, 2.99}) {
    CHECK(s(t) == doctest::Approx(t * t * t - t).epsilon(1e-13));
    CHECK(s.derivative(t) == doctest::Approx(3 * t * t - 1).epsilon(1e-12));
  }
  CHECK_THROWS_AS(s(3.5), std::out_of_range);
  CHECK_THROWS_AS(s(-0.1), std::out_of_range);
}

TEST_CASE("hermite spline limiting keeps monotone data monotone") {
  HermiteSpline s({0, 1, 2, 3}, {0, 0, 1, 1}, {5, 5, 5, 5});
  double prev = -1;
  for (int i = 0; i <= 300; ++i) {
    const double v = s(0.01 * i);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("fornberg weights") {
  const auto w = fd_weights(0.0, {-2, -1, 0, 1, 2}, 1);
  const double want[5] = {1.0 / 12, -2.0 / 3, 0, 2.0 / 3, -1.0 / 12};
  for (int k = 0; k < 5; ++k) CHECK(w[k] == doctest::Approx(want[k]).epsilon(1e-14));
  const auto w2 = fd_weights(0.0, {-1, 0, 1}, 2);
  CHECK(w2[0] == doctest::Approx(1.0));
  CHECK(w2[1] == doctest::Approx(-2.0));
  // nonuniform nodes: exact on quartics
  const std::vector<double> xs{0.0, 0.1, 0.35, 0.4, 0.9};
  const auto w3 = fd_weights(0.3, xs, 1);
  double d = 0;
  for (int k = 0; k < 5; ++k) d += w3[k] * std::pow(xs[k], 4);
  CHECK(d == doctest::Approx(4 * std::pow(0.3, 3)).epsilon(1e-11));
}

TEST_CASE("linear root") { CHECK(linear_root(1, -1, 3, 1) == 2.0); }

TEST_CASE("quintic hermite reproduces quintics") {
  std::vector<double> x, y, d, dd;
  auto f = [](double t) { return std::pow(t, 5) - 2 * t * t; };
  for (int i = 0; i <= 6; ++i) {
    const double t = 0.5 * i;
    x.push_back(t);
    y.push_back(f(t));
    d.push_back(5 * std::pow(t, 4) - 4 * t);
    dd.push_back(20 * t * t * t - 4);
  }
  HermiteSpline s(x, y, d, dd);
  for (double t : {0.1, 1.3, 2.2, 2.95}) {
    CHECK(s(t) == doctest::Approx(f(t)).epsilon(1e-12));
    CHECK(s.derivative(t) == doctest::Approx(5 * std::pow(t, 4) - 4 * t).epsilon(1e-11));
  }
}
