#pragma once

// Weighted Gaussian process over log-scaled time with the min-weight squared
// exponential kernel
//
//   k((tau, w), (tau', w')) = min(w, w') * exp(-gamma^2 (tau - tau')^2)
//
// plus the losses built on its posterior: the uncertainty-aware cross-entropy
// (Monte Carlo estimate and second-order closed form) and the mean/variance
// regulariser integrated over [0, tau_max]. All algebra is double precision.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "wgpnn/pseudo_point.hpp"

namespace wgpnn {

struct KernelParams {
  /// Inverse length-scale, > 0.
  double gamma = 1.0;
  /// Weight attached to query inputs; also the prior variance.
  double query_weight = 1.0;
  /// Initial diagonal jitter, escalated x10 up to kMaxJitter on failure.
  double jitter = 1e-8;

  static constexpr double kMaxJitter = 1e-3;

  void validate() const;
};

double weighted_kernel(double tau1, double w1, double tau2, double w2, const KernelParams& params);

struct PosteriorMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// dLoss/d(tau, logit, weight) per pseudo-point plus dLoss/dgamma.
struct GpGradient {
  std::vector<PseudoPoint> points;
  double gamma = 0.0;
};

/// Posterior of one candidate's logit process given its pseudo-points. The
/// Gram matrix is factorised once; any number of query times can then be
/// evaluated or differentiated.
class WeightedGp {
 public:
  WeightedGp(std::span<const PseudoPoint> points, const KernelParams& params);

  std::size_t size() const noexcept { return points_.size(); }
  double jitter() const noexcept { return jitter_; }

  PosteriorMoments predict(double tau) const;
  std::vector<PosteriorMoments> predict(std::span<const double> taus) const;

  /// Pulls upstream gradients on the moments at `taus` back onto the
  /// pseudo-points and gamma. Clamped variances pass no gradient. At
  /// min-weight ties the gradient goes to the first kernel argument.
  GpGradient backward(std::span<const double> taus, std::span<const double> d_mean,
                      std::span<const double> d_variance) const;

 private:
  Eigen::VectorXd cross_covariance(double tau) const;
  PosteriorMoments moments(const Eigen::VectorXd& cross, double* raw_variance) const;

  std::vector<PseudoPoint> points_;
  KernelParams params_;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd alpha_;
};

std::vector<PosteriorMoments> gp_posterior(std::span<const PseudoPoint> points, std::span<const double> queries,
                                           const KernelParams& params);

/// -log softmax(mean)[target], via log-sum-exp.
double cross_entropy(std::span<const double> mean, std::size_t target);

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// E[-log softmax(z)[target]] for independent z_c ~ N(mean_c, variance_c),
/// estimated from `samples` draws of a generator seeded with `seed`.
MonteCarloEstimate uce_loss_mc(std::span<const double> mean, std::span<const double> variance,
                               std::size_t target, std::size_t samples, std::uint64_t seed);

struct UceLoss {
  double value = 0.0;
  Eigen::VectorXd d_mean;
  Eigen::VectorXd d_variance;
};

/// Second-order expansion of the expected cross-entropy:
///   -mean_t + log S - V / (2 S^2),
/// S = sum_c exp(mean_c + var_c / 2), V = sum_c (exp(var_c) - 1) exp(2 mean_c + var_c).
UceLoss uce_loss_approx(std::span<const double> mean, std::span<const double> variance, std::size_t target);

struct RegularizerConfig {
  double alpha = 1e-3;
  double beta = 1e-3;
  /// Target variance.
  double nu = 1.0;
  /// Upper end of the integration range.
  double tau_max = 1.0;
  std::size_t quad_points = 16;

  void validate() const;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Composite trapezoid rule with quad_points equally spaced nodes on [0, tau_max].
QuadratureRule trapezoid_rule(const RegularizerConfig& config);

/// Quadrature of alpha * mean^2 + beta * (nu - variance)^2 given the moments
/// at the rule's nodes. Writes the gradients w.r.t. those moments when the
/// output spans are non-empty.
double regularizer_from_moments(std::span<const PosteriorMoments> at_nodes, const QuadratureRule& rule,
                                const RegularizerConfig& config, std::span<double> d_mean = {},
                                std::span<double> d_variance = {});

double regularizer(std::span<const PseudoPoint> points, const KernelParams& params, const RegularizerConfig& config);

struct CandidateScores {
  std::vector<double> mean;
  std::vector<double> variance;
  /// softmax(mean), for reporting.
  std::vector<double> probability;
};

/// Posterior moments of every candidate at tau_star; ranking score is the mean.
CandidateScores predict_scores(const PseudoPointSet& points, double tau_star, const KernelParams& params);

}  // namespace wgpnn
