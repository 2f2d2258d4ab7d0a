#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance suite.

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wgpnn/pseudo_point.hpp"
#include "wgpnn/wgp.hpp"

namespace wgpnn::testing {

inline Eigen::MatrixXd gram_matrix(std::span<const PseudoPoint> points, double gamma) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& a = points[static_cast<std::size_t>(i)];
      const auto& b = points[static_cast<std::size_t>(j)];
      const double d = a.tau - b.tau;
      k(i, j) = std::min(a.weight, b.weight) * std::exp(-gamma * gamma * d * d);
    }
  }
  return k;
}

/// Posterior by explicit matrix inverse, unclamped.
inline PosteriorMoments dense_posterior(std::span<const PseudoPoint> points, double tau, double gamma,
                                        double jitter, double query_weight = 1.0) {
  if (points.empty()) return {0.0, query_weight};
  Eigen::MatrixXd k = gram_matrix(points, gamma);
  k.diagonal().array() += jitter;
  const Eigen::MatrixXd inv = k.inverse();
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd cross(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    const double d = p.tau - tau;
    cross[i] = std::min(p.weight, query_weight) * std::exp(-gamma * gamma * d * d);
    y[i] = p.logit;
  }
  return {cross.dot(inv * y), query_weight - cross.dot(inv * cross)};
}

/// Random pseudo-points with tau in [0, 5], logit in [0, 5], weight in (0.05, 1)
/// and pairwise tau gaps of at least min_gap.
inline std::vector<PseudoPoint> random_points(std::mt19937_64& rng, std::size_t n, double min_gap = 0.0) {
  std::uniform_real_distribution<double> tau(0.0, 5.0), logit(0.0, 5.0), weight(0.05, 1.0);
  std::vector<PseudoPoint> out;
  while (out.size() < n) {
    const PseudoPoint p{tau(rng), logit(rng), weight(rng)};
    bool ok = true;
    for (const auto& q : out) ok &= std::abs(q.tau - p.tau) >= min_gap;
    if (ok) out.push_back(p);
  }
  return out;
}

/// The correction term exactly as printed, with exp(var - 1) in place of
/// exp(var) - 1.
inline double uce_printed_variant(std::span<const double> mean, std::span<const double> variance,
                                  std::size_t target) {
  double s = 0.0, v = 0.0;
  for (std::size_t c = 0; c < mean.size(); ++c) {
    s += std::exp(mean[c] + 0.5 * variance[c]);
    v += std::exp(variance[c] - 1.0) * std::exp(2.0 * mean[c] + variance[c]);
  }
  return -mean[target] + std::log(s) - v / (2.0 * s * s);
}

}  // namespace wgpnn::testing
