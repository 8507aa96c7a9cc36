#include "phimin/numerics/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace phimin::numerics {

namespace {

// Kronrod nodes (positive half) and weights; Gauss weights on odd indices.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

double gauss_kronrod15(const std::function<double(double)>& f, double a,
                       double b, double& err) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  err = std::abs((kronrod - gauss) * half);
  return kronrod * half;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opts) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> heap;
  double err = 0.0;
  double v = gauss_kronrod15(f, a, b, err);
  heap.push({a, b, v, err});
  double total = v, total_err = err;
  while (true) {
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (total_err <= target) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(heap.size()) >= opts.max_intervals) break;
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // panel no longer splittable
    heap.pop();
    double e1 = 0.0, e2 = 0.0;
    const double v1 = gauss_kronrod15(f, worst.a, mid, e1);
    const double v2 = gauss_kronrod15(f, mid, worst.b, e2);
    heap.push({worst.a, mid, v1, e1});
    heap.push({mid, worst.b, v2, e2});
    total += v1 + v2 - worst.value;
    total_err += e1 + e2 - worst.error;
    if (total_err < 0) total_err = 0;
  }
  // Re-sum to remove drift from incremental updates.
  out.value = 0.0;
  out.error = 0.0;
  out.intervals = static_cast<int>(heap.size());
  std::vector<Panel> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  for (auto it = panels.rbegin(); it != panels.rend(); ++it) {
    out.value += it->value;
    out.error += it->error;
  }
  return out;
}

}  // namespace phimin::numerics
