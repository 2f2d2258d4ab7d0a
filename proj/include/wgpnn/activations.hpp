#pragma once

#include <algorithm>
#include <cmath>

namespace wgpnn {

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double inverse_softplus(double y) { return y + std::log(-std::expm1(-y)); }

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace wgpnn
