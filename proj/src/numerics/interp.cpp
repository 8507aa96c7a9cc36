#include "phimin/numerics/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phimin::numerics {

HermiteSpline::HermiteSpline(std::vector<double> x, std::vector<double> y,
                             std::vector<double> d, bool limit)
    : x_(std::move(x)), y_(std::move(y)), d_(std::move(d)) {
  if (x_.size() < 2 || y_.size() != x_.size() || d_.size() != x_.size())
    throw std::invalid_argument("HermiteSpline: need >= 2 consistent samples");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("HermiteSpline: x not increasing");
  if (!limit) return;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double delta = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    if (delta == 0.0) {
      d_[i] = d_[i + 1] = 0.0;
      continue;
    }
    double a = d_[i] / delta, b = d_[i + 1] / delta;
    if (a < 0) d_[i] = 0, a = 0;
    if (b < 0) d_[i + 1] = 0, b = 0;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      d_[i] = tau * a * delta;
      d_[i + 1] = tau * b * delta;
    }
  }
}

HermiteSpline::HermiteSpline(std::vector<double> x, std::vector<double> y,
                             std::vector<double> d, std::vector<double> dd)
    : HermiteSpline(std::move(x), std::move(y), std::move(d), false) {
  if (dd.size() != x_.size()) throw std::invalid_argument("HermiteSpline: need >= 2 consistent samples");
  dd_ = std::move(dd);
}

std::size_t HermiteSpline::locate(double t) const {
  if (t < x_.front() || t > x_.back())
    throw std::out_of_range("HermiteSpline: evaluation outside sampled range");
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, x_.size() - 2);
}

double HermiteSpline::operator()(double t) const {
  const std::size_t i = locate(t);
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  if (!dd_.empty()) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    return (1 - 10 * s3 + 15 * s4 - 6 * s5) * y_[i] + (s - 6 * s3 + 8 * s4 - 3 * s5) * h * d_[i] +
           (0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5) * h * h * dd_[i] +
           (0.5 * s3 - s4 + 0.5 * s5) * h * h * dd_[i + 1] + (-4 * s3 + 7 * s4 - 3 * s5) * h * d_[i + 1] +
           (10 * s3 - 15 * s4 + 6 * s5) * y_[i + 1];
  }
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double HermiteSpline::derivative(double t) const {
  const std::size_t i = locate(t);
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  if (!dd_.empty()) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    return (-30 * s2 + 60 * s3 - 30 * s4) / h * (y_[i] - y_[i + 1]) + (1 - 18 * s2 + 32 * s3 - 15 * s4) * d_[i] +
           (s - 4.5 * s2 + 6 * s3 - 2.5 * s4) * h * dd_[i] + (1.5 * s2 - 4 * s3 + 2.5 * s4) * h * dd_[i + 1] +
           (-12 * s2 + 28 * s3 - 15 * s4) * d_[i + 1];
  }
  const double g00 = 6 * s * (s - 1) / h;
  const double g10 = (1 - s) * (1 - 3 * s);
  const double g01 = -g00;
  const double g11 = s * (3 * s - 2);
  return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m) {
  const int n = static_cast<int>(xs.size()) - 1;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

}  // namespace phimin::numerics
