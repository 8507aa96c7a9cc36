#pragma once

// Adaptive one-step integrators used by the reaper and rotational solvers.
//
// Dopri5: explicit embedded Runge-Kutta 5(4) with PI step-size control.
// Radau5: three-stage Radau IIA collocation (order 5, L-stable) with
//         step-doubling error control, for the stiff far-field regime.
//
// Both drivers report every accepted step through a callback that may stop
// the integration. A step record carries the endpoint states and slopes so
// callers can interpolate with cubic Hermite polynomials.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

namespace phimin::numerics {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct StepRecord {
  double t0 = 0, t1 = 0;
  State<N> y0{}, y1{}, f0{}, f1{};
};

enum class OdeStatus { reached_end, stopped, step_underflow, non_finite, newton_failure };

struct OdeStats {
  OdeStatus status = OdeStatus::reached_end;
  long accepted = 0;
  long rejected = 0;
  double t_final = 0;
  double last_step = 0;
};

template <std::size_t N>
struct OdeOptions {
  double rtol = 1e-10;
  State<N> atol{};          // absolute floor per component
  double h_init = 0;        // 0 -> automatic
  double h_max = std::numeric_limits<double>::infinity();
  double h_min = 0;         // below this -> step_underflow
  long max_steps = 5'000'000;
};

/// Cubic Hermite value of component i at t within a step.
template <std::size_t N>
double hermite(const StepRecord<N>& s, std::size_t i, double t) {
  const double h = s.t1 - s.t0;
  const double th = (t - s.t0) / h;
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  const double h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th);
  const double h11 = th * th * (th - 1);
  return h00 * s.y0[i] + h10 * h * s.f0[i] + h01 * s.y1[i] + h11 * h * s.f1[i];
}

template <std::size_t N>
State<N> hermite_state(const StepRecord<N>& s, double t) {
  State<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = hermite(s, i, t);
  return out;
}

namespace detail {

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1,
                  const OdeOptions<N>& o) {
  double acc = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = o.atol[i] + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = sc > 0 ? err[i] / sc : 0.0;
    acc += q * q;
  }
  return std::sqrt(acc / N);
}

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

template <std::size_t N>
class Dopri5 {
 public:
  using Rhs = std::function<State<N>(double, const State<N>&)>;
  using Observer = std::function<bool(const StepRecord<N>&)>;

  Dopri5(Rhs rhs, OdeOptions<N> opts) : rhs_(std::move(rhs)), opts_(opts) {}

  /// Integrates from (t0, y0) toward t_end (t_end > t0). The observer returns
  /// false to stop after the current step.
  OdeStats integrate(double t0, State<N> y, double t_end, const Observer& observe) const {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double kAlpha = 0.17, kBeta = 0.04, kSafe = 0.9;

    OdeStats stats;
    double t = t0;
    State<N> k1 = rhs_(t, y);
    double h = opts_.h_init > 0 ? opts_.h_init : initial_step(t, y, k1);
    h = std::min({h, opts_.h_max, t_end - t});
    double err_old = 1e-4;
    bool last_rejected = false;

    auto axpy = [](const State<N>& base, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
      State<N> out = base;
      for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
      return out;
    };

    while (t < t_end) {
      if (stats.accepted + stats.rejected > opts_.max_steps || h <= opts_.h_min ||
          t + h == t) {
        stats.status = OdeStatus::step_underflow;
        break;
      }
      const State<N> k2 = rhs_(t + c2 * h, axpy(y, h, {{a21, &k1}}));
      const State<N> k3 = rhs_(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      const State<N> k4 = rhs_(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State<N> k5 =
          rhs_(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const State<N> k6 = rhs_(
          t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const State<N> y_new = axpy(
          y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
      const State<N> k7 = rhs_(t + h, y_new);
      State<N> err{};
      for (std::size_t i = 0; i < N; ++i)
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                      e7 * k7[i]);
      double en = detail::error_norm(err, y, y_new, opts_);
      if (!std::isfinite(en) || !detail::all_finite(y_new)) {
        ++stats.rejected;
        h *= 0.25;
        last_rejected = true;
        continue;
      }
      if (en <= 1.0) {
        StepRecord<N> rec{t, t + h, y, y_new, k1, k7};
        ++stats.accepted;
        t = (t_end - (t + h) <= 1e-15 * std::abs(t_end)) ? t_end : t + h;
        rec.t1 = t;
        y = y_new;
        k1 = k7;
        stats.last_step = h;
        en = std::max(en, 1e-10);
        double fac = std::pow(en, -kAlpha) * std::pow(err_old, kBeta) * kSafe;
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
        err_old = en;
        last_rejected = false;
        h = std::min(h * fac, opts_.h_max);
        if (!observe(rec)) {
          stats.status = OdeStatus::stopped;
          stats.t_final = t;
          return stats;
        }
        if (t < t_end) h = std::min(h, t_end - t);
      } else {
        ++stats.rejected;
        h *= std::max(0.2, kSafe * std::pow(en, -kAlpha));
        last_rejected = true;
      }
    }
    stats.t_final = t;
    return stats;
  }

 private:
  double initial_step(double t, const State<N>& y, const State<N>& f) const {
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts_.atol[i] + opts_.rtol * std::abs(y[i]);
      if (sc <= 0) continue;
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (f[i] / sc) * (f[i] / sc);
    }
    double h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * std::sqrt(d0 / d1);
    (void)t;
    return std::min(h, opts_.h_max);
  }

  Rhs rhs_;
  OdeOptions<N> opts_;
};

/// Three-stage Radau IIA. Nonlinear stage equations are solved by simplified
/// Newton with a finite-difference Jacobian frozen over the step; local error
/// is estimated by comparing one step of size h with two of size h/2.
/// An analytic Jacobian should be supplied when the right-hand side is the
/// small difference of large terms; forward differences are noise there.
template <std::size_t N>
class Radau5 {
 public:
  using Rhs = std::function<State<N>(double, const State<N>&)>;
  using Jac = std::function<std::array<State<N>, N>(double, const State<N>&)>;  // rows
  using Observer = std::function<bool(const StepRecord<N>&)>;

  Radau5(Rhs rhs, OdeOptions<N> opts, Jac jac = {})
      : rhs_(std::move(rhs)), jac_(std::move(jac)), opts_(opts) {}

  OdeStats integrate(double t0, State<N> y, double t_end, const Observer& observe) const {
    OdeStats stats;
    double t = t0;
    double h = opts_.h_init > 0 ? opts_.h_init : 1e-3 * std::max(1.0, std::abs(t0));
    h = std::min({h, opts_.h_max, t_end - t});
    State<N> f = rhs_(t, y);
    while (t < t_end) {
      if (stats.accepted + stats.rejected > opts_.max_steps || h <= opts_.h_min ||
          t + h == t) {
        stats.status = OdeStatus::step_underflow;
        break;
      }
      State<N> y_big{}, y_mid{}, y_two{};
      const bool ok = step(t, y, h, y_big) && step(t, y, 0.5 * h, y_mid) &&
                      step(t + 0.5 * h, y_mid, 0.5 * h, y_two);
      if (!ok || !detail::all_finite(y_two)) {
        ++stats.rejected;
        h *= 0.25;
        continue;
      }
      State<N> err{};
      for (std::size_t i = 0; i < N; ++i) err[i] = (y_two[i] - y_big[i]) / 31.0;
      double en = detail::error_norm(err, y, y_two, opts_);
      if (!std::isfinite(en)) {
        ++stats.rejected;
        h *= 0.25;
        continue;
      }
      if (en <= 1.0) {
        const double t_new = (t_end - (t + h) <= 1e-15 * std::abs(t_end)) ? t_end : t + h;
        const State<N> f_new = rhs_(t_new, y_two);
        StepRecord<N> rec{t, t_new, y, y_two, f, f_new};
        ++stats.accepted;
        stats.last_step = h;
        t = t_new;
        y = y_two;
        f = f_new;
        const double fac = std::clamp(0.9 * std::pow(std::max(en, 1e-12), -1.0 / 6.0), 0.2, 4.0);
        h = std::min(h * fac, opts_.h_max);
        if (!observe(rec)) {
          stats.status = OdeStatus::stopped;
          stats.t_final = t;
          return stats;
        }
        if (t < t_end) h = std::min(h, t_end - t);
      } else {
        ++stats.rejected;
        h *= std::clamp(0.9 * std::pow(en, -1.0 / 6.0), 0.1, 0.9);
      }
    }
    stats.t_final = t;
    return stats;
  }

 private:
  using Vec = Eigen::Matrix<double, static_cast<int>(N), 1>;
  using Mat = Eigen::Matrix<double, static_cast<int>(N), static_cast<int>(N)>;
  using BigVec = Eigen::Matrix<double, static_cast<int>(3 * N), 1>;
  using BigMat = Eigen::Matrix<double, static_cast<int>(3 * N), static_cast<int>(3 * N)>;

  static Vec to_vec(const State<N>& s) {
    Vec v;
    for (std::size_t i = 0; i < N; ++i) v(i) = s[i];
    return v;
  }
  static State<N> to_state(const Vec& v) {
    State<N> s{};
    for (std::size_t i = 0; i < N; ++i) s[i] = v(i);
    return s;
  }

  Mat jacobian(double t, const State<N>& y, const State<N>& f0) const {
    Mat J;
    if (jac_) {
      const auto rows = jac_(t, y);
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) J(i, j) = rows[i][j];
      return J;
    }
    for (std::size_t j = 0; j < N; ++j) {
      State<N> yp = y;
      const double delta = 1e-8 * (y[j] != 0 ? std::abs(y[j]) : 1.0);
      yp[j] += delta;
      const State<N> fp = rhs_(t, yp);
      for (std::size_t i = 0; i < N; ++i) J(i, j) = (fp[i] - f0[i]) / (yp[j] - y[j]);
    }
    return J;
  }

  bool step(double t, const State<N>& y, double h, State<N>& y_out) const {
    static const double s6 = std::sqrt(6.0);
    static const double c[3] = {(4 - s6) / 10, (4 + s6) / 10, 1.0};
    static const double A[3][3] = {
        {(88 - 7 * s6) / 360, (296 - 169 * s6) / 1800, (-2 + 3 * s6) / 225},
        {(296 + 169 * s6) / 1800, (88 + 7 * s6) / 360, (-2 - 3 * s6) / 225},
        {(16 - s6) / 36, (16 + s6) / 36, 1.0 / 9}};
    const State<N> f0 = rhs_(t, y);
    if (!detail::all_finite(f0)) return false;
    const Mat J = jacobian(t, y, f0);
    BigMat M = BigMat::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        M.template block<N, N>(i * N, j * N) -= h * A[i][j] * J;
    Eigen::PartialPivLU<BigMat> lu(M);
    const Vec y0 = to_vec(y);
    Vec scale;
    for (std::size_t i = 0; i < N; ++i)
      scale(i) = opts_.atol[i] + opts_.rtol * std::abs(y[i]) + 1e-300;

    // Z = 0 rather than an explicit predictor: on stiff components f(y0) can be
    // pure rounding noise far larger than the stage increments.
    BigVec Z = BigVec::Zero();
    for (int iter = 0; iter < 12; ++iter) {
      Vec F[3];
      for (int j = 0; j < 3; ++j) {
        const State<N> fj = rhs_(t + c[j] * h, to_state(y0 + Z.template segment<N>(j * N)));
        if (!detail::all_finite(fj)) return false;
        F[j] = to_vec(fj);
      }
      BigVec G;
      for (int i = 0; i < 3; ++i) {
        Vec acc = -Z.template segment<N>(i * N);
        for (int j = 0; j < 3; ++j) acc += h * A[i][j] * F[j];
        G.template segment<N>(i * N) = acc;
      }
      const BigVec dZ = lu.solve(G);
      Z += dZ;
      double norm = 0;
      for (int i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < N; ++k) {
          const double q = dZ(i * N + k) / scale(k);
          norm = std::max(norm, std::abs(q));
        }
      if (!std::isfinite(norm)) return false;
      if (norm < 1e-3) {
        y_out = to_state(y0 + Z.template segment<N>(2 * N));
        return true;
      }
    }
    return false;
  }

  Rhs rhs_;
  Jac jac_;
  OdeOptions<N> opts_;
};

}  // namespace phimin::numerics

namespace phimin::numerics {
extern template class Dopri5<2>;
extern template class Dopri5<3>;
extern template class Radau5<3>;
}  // namespace phimin::numerics
