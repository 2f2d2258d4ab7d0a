#pragma once

// Central finite differences for gradient checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>

namespace wgpnn::testing {

inline double central_difference(double& x, const std::function<double()>& f, double eps = 1e-5) {
  const double saved = x;
  x = saved + eps;
  const double up = f();
  x = saved - eps;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * eps);
}

/// |a - n| / max(|a|, |n|, floor). Central differences at eps = 1e-5 carry
/// about 1e-11 of rounding noise on O(1) losses, so smaller gradients are
/// compared absolutely.
inline double gradient_error(double analytic, double numeric, double floor = 1e-6) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < floor) return std::abs(analytic - numeric) / floor;
  return std::abs(analytic - numeric) / scale;
}

}  // namespace wgpnn::testing
