#pragma once

#include <functional>

namespace phimin {

/// Value and derivatives up to order two of a graph z = u(x, y).
struct GraphJet {
  double u = 0, ux = 0, uy = 0, uxx = 0, uyy = 0, uxy = 0;
};

using GraphFn = std::function<GraphJet(double, double)>;

}  // namespace phimin
