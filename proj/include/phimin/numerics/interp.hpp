#pragma once

#include <cstddef>
#include <vector>

namespace phimin::numerics {

/// Piecewise cubic Hermite interpolant through (x_i, y_i) with slopes d_i.
/// Slopes are limited (Fritsch-Carlson) so monotone data stays monotone;
/// exact slopes of smooth monotone data pass through untouched.
class HermiteSpline {
 public:
  HermiteSpline() = default;
  HermiteSpline(std::vector<double> x, std::vector<double> y, std::vector<double> d,
                bool limit = true);
  /// Quintic Hermite through values, slopes and second derivatives (no limiting).
  HermiteSpline(std::vector<double> x, std::vector<double> y, std::vector<double> d,
                std::vector<double> dd);

  double operator()(double t) const;
  double derivative(double t) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t locate(double t) const;
  std::vector<double> x_, y_, d_, dd_;  // dd_ empty for the cubic form
};

/// Finite-difference weights for the m-th derivative at x0 on nodes xs
/// (Fornberg's recursion).
std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m);

/// Linear root of a sign change between (x0,f0) and (x1,f1).
inline double linear_root(double x0, double f0, double x1, double f1) {
  return x0 - f0 * (x1 - x0) / (f1 - f0);
}

}  // namespace phimin::numerics
