#include "wgpnn/wgp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "wgpnn/error.hpp"

namespace wgpnn {

namespace {

double log_sum_exp(std::span<const double> values) {
  const double top = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (const double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

void require_same_size(std::span<const double> mean, std::span<const double> variance, std::size_t target) {
  if (mean.empty() || mean.size() != variance.size() || target >= mean.size()) {
    throw Error(ErrorCategory::kNumeric, "uce loss: mean/variance sizes mismatch or target out of range");
  }
}

}  // namespace

void KernelParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCategory::kConfig, "kernel: gamma must be > 0");
  if (!(query_weight > 0.0 && query_weight <= 1.0)) {
    throw Error(ErrorCategory::kConfig, "kernel: query_weight must lie in (0, 1]");
  }
  if (!(jitter >= 0.0 && jitter <= kMaxJitter)) {
    throw Error(ErrorCategory::kConfig, "kernel: jitter must lie in [0, 1e-3]");
  }
}

double weighted_kernel(double tau1, double w1, double tau2, double w2, const KernelParams& params) {
  const double d = tau1 - tau2;
  return std::min(w1, w2) * std::exp(-params.gamma * params.gamma * d * d);
}

WeightedGp::WeightedGp(std::span<const PseudoPoint> points, const KernelParams& params)
    : points_(points.begin(), points.end()), params_(params), jitter_(params.jitter) {
  const auto n = static_cast<Eigen::Index>(points_.size());
  if (n == 0) return;
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& a = points_[static_cast<std::size_t>(i)];
      const auto& b = points_[static_cast<std::size_t>(j)];
      gram(i, j) = weighted_kernel(a.tau, a.weight, b.tau, b.weight, params_);
    }
  }
  while (true) {
    Eigen::MatrixXd jittered = gram;
    jittered.diagonal().array() += jitter_;
    factor_.compute(jittered);
    // Pivots at rounding level mean the matrix is numerically singular.
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * jittered.diagonal().maxCoeff();
    if (factor_.info() == Eigen::Success && factor_.matrixLLT().allFinite() &&
        factor_.matrixLLT().diagonal().array().square().minCoeff() > floor) {
      break;
    }
    const double next = jitter_ > 0.0 ? jitter_ * 10.0 : 1e-8;
    if (next > KernelParams::kMaxJitter * (1.0 + 1e-9)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
      std::ostringstream msg;
      msg << "gp posterior: Cholesky failed at jitter " << jitter_ << "; Gram eigenvalues in ["
          << eig.eigenvalues().minCoeff() << ", " << eig.eigenvalues().maxCoeff() << "]";
      throw Error(ErrorCategory::kNumeric, msg.str());
    }
    jitter_ = next;
  }
  Eigen::VectorXd logits(n);
  for (Eigen::Index i = 0; i < n; ++i) logits[i] = points_[static_cast<std::size_t>(i)].logit;
  alpha_ = factor_.solve(logits);
}

Eigen::VectorXd WeightedGp::cross_covariance(double tau) const {
  Eigen::VectorXd k(static_cast<Eigen::Index>(points_.size()));
  for (std::size_t i = 0; i < points_.size(); ++i) {
    k[static_cast<Eigen::Index>(i)] =
        weighted_kernel(points_[i].tau, points_[i].weight, tau, params_.query_weight, params_);
  }
  return k;
}

PosteriorMoments WeightedGp::moments(const Eigen::VectorXd& cross, double* raw_variance) const {
  if (points_.empty()) {
    if (raw_variance) *raw_variance = params_.query_weight;
    return {0.0, params_.query_weight};
  }
  const double mean = cross.dot(alpha_);
  const double raw = params_.query_weight - cross.dot(factor_.solve(cross));
  if (raw_variance) *raw_variance = raw;
  return {mean, std::clamp(raw, 0.0, params_.query_weight)};
}

PosteriorMoments WeightedGp::predict(double tau) const { return moments(cross_covariance(tau), nullptr); }

std::vector<PosteriorMoments> WeightedGp::predict(std::span<const double> taus) const {
  std::vector<PosteriorMoments> out;
  out.reserve(taus.size());
  for (const double tau : taus) out.push_back(predict(tau));
  return out;
}

GpGradient WeightedGp::backward(std::span<const double> taus, std::span<const double> d_mean,
                                std::span<const double> d_variance) const {
  const auto n = static_cast<Eigen::Index>(points_.size());
  GpGradient grad;
  grad.points.assign(points_.size(), PseudoPoint{0.0, 0.0, 0.0});
  if (n == 0) return grad;

  const double gamma = params_.gamma;
  const double gamma_sq = gamma * gamma;
  Eigen::MatrixXd d_gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd d_logits = Eigen::VectorXd::Zero(n);

  for (std::size_t q = 0; q < taus.size(); ++q) {
    const double gm = d_mean[q];
    double gv = d_variance[q];
    if (gm == 0.0 && gv == 0.0) continue;
    const Eigen::VectorXd cross = cross_covariance(taus[q]);
    const Eigen::VectorXd beta = factor_.solve(cross);
    const double raw = params_.query_weight - cross.dot(beta);
    if (raw < 0.0 || raw > params_.query_weight) gv = 0.0;

    d_gram.noalias() += beta * (gv * beta - gm * alpha_).transpose();
    d_logits += gm * beta;
    const Eigen::VectorXd d_cross = gm * alpha_ - 2.0 * gv * beta;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& p = points_[static_cast<std::size_t>(j)];
      const double diff = p.tau - taus[q];
      const double decay = std::exp(-gamma_sq * diff * diff);
      const double scale = std::min(p.weight, params_.query_weight);
      auto& g = grad.points[static_cast<std::size_t>(j)];
      g.tau += d_cross[j] * (-2.0 * gamma_sq * diff * scale * decay);
      grad.gamma += d_cross[j] * (-2.0 * gamma * diff * diff * scale * decay);
      if (p.weight <= params_.query_weight) g.weight += d_cross[j] * decay;
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& a = points_[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const double coeff = d_gram(i, j);
      if (coeff == 0.0) continue;
      const auto& b = points_[static_cast<std::size_t>(j)];
      const double diff = a.tau - b.tau;
      const double decay = std::exp(-gamma_sq * diff * diff);
      const double scale = std::min(a.weight, b.weight);
      const double d_diff = coeff * (-2.0 * gamma_sq * diff * scale * decay);
      grad.points[static_cast<std::size_t>(i)].tau += d_diff;
      grad.points[static_cast<std::size_t>(j)].tau -= d_diff;
      grad.gamma += coeff * (-2.0 * gamma * diff * diff * scale * decay);
      const auto owner = a.weight <= b.weight ? i : j;
      grad.points[static_cast<std::size_t>(owner)].weight += coeff * decay;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) grad.points[static_cast<std::size_t>(i)].logit = d_logits[i];
  return grad;
}

std::vector<PosteriorMoments> gp_posterior(std::span<const PseudoPoint> points, std::span<const double> queries,
                                           const KernelParams& params) {
  params.validate();
  return WeightedGp(points, params).predict(queries);
}

double cross_entropy(std::span<const double> mean, std::size_t target) {
  if (target >= mean.size()) throw Error(ErrorCategory::kNumeric, "cross entropy: target out of range");
  return log_sum_exp(mean) - mean[target];
}

MonteCarloEstimate uce_loss_mc(std::span<const double> mean, std::span<const double> variance, std::size_t target,
                               std::size_t samples, std::uint64_t seed) {
  require_same_size(mean, variance, target);
  if (samples == 0) throw Error(ErrorCategory::kNumeric, "uce_loss_mc: need at least one sample");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> stddev(mean.size());
  for (std::size_t c = 0; c < mean.size(); ++c) stddev[c] = std::sqrt(std::max(variance[c], 0.0));
  std::vector<double> z(mean.size());
  double running_mean = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 1; s <= samples; ++s) {
    for (std::size_t c = 0; c < mean.size(); ++c) z[c] = mean[c] + stddev[c] * normal(rng);
    const double loss = log_sum_exp(z) - z[target];
    const double delta = loss - running_mean;
    running_mean += delta / static_cast<double>(s);
    sum_sq += delta * (loss - running_mean);
  }
  const double n = static_cast<double>(samples);
  const double sample_variance = samples > 1 ? sum_sq / (n - 1.0) : 0.0;
  return {running_mean, std::sqrt(sample_variance / n)};
}

UceLoss uce_loss_approx(std::span<const double> mean, std::span<const double> variance, std::size_t target) {
  require_same_size(mean, variance, target);
  const auto c = static_cast<Eigen::Index>(mean.size());
  double shift = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < c; ++i) shift = std::max(shift, mean[i] + 0.5 * variance[i]);

  // Everything below is scaled by exp(-shift) (first moments) or
  // exp(-2 shift) (second moments); the scale cancels in the ratio.
  Eigen::VectorXd first(c), spread(c), spread_base(c);
  for (Eigen::Index i = 0; i < c; ++i) {
    const auto k = static_cast<std::size_t>(i);
    first[i] = std::exp(mean[k] + 0.5 * variance[k] - shift);
    spread_base[i] = std::exp(2.0 * mean[k] + variance[k] - 2.0 * shift);
    spread[i] = std::expm1(variance[k]) * spread_base[i];
  }
  const double total = first.sum();
  const double total_spread = spread.sum();
  const double correction = total_spread / (2.0 * total * total);

  UceLoss out;
  out.value = -mean[target] + shift + std::log(total) - correction;
  const double total_cubed = total * total * total;
  out.d_mean = first / total;
  out.d_mean -= spread / (total * total) - (total_spread / total_cubed) * first;
  out.d_mean[static_cast<Eigen::Index>(target)] -= 1.0;
  out.d_variance.resize(c);
  for (Eigen::Index i = 0; i < c; ++i) {
    const double exp_var = std::exp(variance[static_cast<std::size_t>(i)]);
    const double d_spread = (2.0 * exp_var - 1.0) * spread_base[i];
    const double d_correction = d_spread / (2.0 * total * total) - total_spread / total_cubed * 0.5 * first[i];
    out.d_variance[i] = 0.5 * first[i] / total - d_correction;
  }
  return out;
}

void RegularizerConfig::validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && nu >= 0.0)) {
    throw Error(ErrorCategory::kConfig, "regularizer: alpha, beta, nu must be non-negative");
  }
  if (!(tau_max > 0.0)) throw Error(ErrorCategory::kConfig, "regularizer: tau_max must be positive");
  if (quad_points < 2) throw Error(ErrorCategory::kConfig, "regularizer: quad_points must be >= 2");
}

QuadratureRule trapezoid_rule(const RegularizerConfig& config) {
  config.validate();
  QuadratureRule rule;
  const double step = config.tau_max / static_cast<double>(config.quad_points - 1);
  for (std::size_t k = 0; k < config.quad_points; ++k) {
    rule.nodes.push_back(step * static_cast<double>(k));
    rule.weights.push_back(k == 0 || k + 1 == config.quad_points ? 0.5 * step : step);
  }
  return rule;
}

double regularizer_from_moments(std::span<const PosteriorMoments> at_nodes, const QuadratureRule& rule,
                                const RegularizerConfig& config, std::span<double> d_mean,
                                std::span<double> d_variance) {
  double value = 0.0;
  for (std::size_t k = 0; k < at_nodes.size(); ++k) {
    const double mu = at_nodes[k].mean;
    const double gap = config.nu - at_nodes[k].variance;
    value += rule.weights[k] * (config.alpha * mu * mu + config.beta * gap * gap);
    if (!d_mean.empty()) d_mean[k] = rule.weights[k] * 2.0 * config.alpha * mu;
    if (!d_variance.empty()) d_variance[k] = -rule.weights[k] * 2.0 * config.beta * gap;
  }
  return value;
}

double regularizer(std::span<const PseudoPoint> points, const KernelParams& params, const RegularizerConfig& config) {
  const auto rule = trapezoid_rule(config);
  const auto moments = gp_posterior(points, rule.nodes, params);
  return regularizer_from_moments(moments, rule, config);
}

CandidateScores predict_scores(const PseudoPointSet& points, double tau_star, const KernelParams& params) {
  params.validate();
  CandidateScores scores;
  for (std::size_t c = 0; c < points.candidates(); ++c) {
    const auto m = WeightedGp(points.candidate(c), params).predict(tau_star);
    scores.mean.push_back(m.mean);
    scores.variance.push_back(m.variance);
  }
  if (!scores.mean.empty()) {
    const double lse = log_sum_exp(scores.mean);
    for (const double mu : scores.mean) scores.probability.push_back(std::exp(mu - lse));
  }
  return scores;
}

}  // namespace wgpnn
