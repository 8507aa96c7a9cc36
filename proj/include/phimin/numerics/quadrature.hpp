#pragma once

#include <functional>
#include <stdexcept>

namespace phimin::numerics {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
/// Nodes never touch the endpoints, so integrable endpoint singularities are
/// tolerated as long as the integrand is finite at interior points.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opts = {});

/// Single G7/K15 panel; returns the Kronrod value and writes |K15 - G7|.
double gauss_kronrod15(const std::function<double(double)>& f, double a,
                       double b, double& err);

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double bracket_lo() const { return lo_; }
  double bracket_hi() const { return hi_; }

 private:
  double lo_, hi_;
};

}  // namespace phimin::numerics
