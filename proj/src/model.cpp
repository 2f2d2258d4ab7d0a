#include "wgpnn/model.hpp"

#include <cmath>

#include "wgpnn/error.hpp"
#include "wgpnn/neural.hpp"

namespace wgpnn {

double query_offset(const HistoryWindow& window, Timestamp query_time, Timestamp time_unit, double tau_max) {
  const double unit = static_cast<double>(time_unit);
  if (window.entries.empty()) return std::min(std::log1p(static_cast<double>(query_time) / unit), tau_max);
  const double gap = static_cast<double>(query_time - window.entries.back().time);
  return std::log1p(gap / unit);
}

Prediction predict(const ModelParams& params, const GraphStore& store, const Query& query,
                   const ForwardConfig& config) {
  if (query.subject >= params.shape.num_entities || query.predicate >= params.shape.num_predicates) {
    throw Error(ErrorCategory::kDictionary, "query ids outside the model's dictionaries");
  }
  Prediction out;
  out.window = store.history(query.subject, query.predicate, query.time, config.window_size);
  out.tau_star = query_offset(out.window, query.time, config.time_unit, config.regularizer.tau_max);
  const auto state = encode_history(out.window, params);
  out.points = generate_pseudo_points(state, params.heads, params.shape.pseudo_points, params.shape.candidates());
  out.scores = predict_scores(out.points, out.tau_star, config.kernel(params));
  return out;
}

EventLoss event_loss(const ModelParams& params, const GraphStore& store, const Quadruple& event,
                     const ForwardConfig& config, ModelParams* grad, double grad_scale) {
  const auto window = store.history(event.subject, event.predicate, event.time, config.window_size);
  const double tau_star = query_offset(window, event.time, config.time_unit, config.regularizer.tau_max);
  const auto kernel = config.kernel(params);
  const auto rule = trapezoid_rule(config.regularizer);

  EncoderTrace encoder_trace;
  HeadTrace head_trace;
  const auto state = encode_history(window, params, grad ? &encoder_trace : nullptr);
  const auto candidates = params.shape.candidates();
  const auto points = generate_pseudo_points(state, params.heads, params.shape.pseudo_points, candidates,
                                             grad ? &head_trace : nullptr);

  std::vector<WeightedGp> processes;
  processes.reserve(candidates);
  std::vector<double> mean(candidates), variance(candidates);
  EventLoss loss;
  const std::size_t nodes = rule.nodes.size();
  std::vector<double> reg_d_mean(candidates * nodes), reg_d_variance(candidates * nodes);
  for (std::size_t c = 0; c < candidates; ++c) {
    processes.emplace_back(points.candidate(c), kernel);
    const auto at_query = processes.back().predict(tau_star);
    mean[c] = at_query.mean;
    variance[c] = at_query.variance;
    const auto at_nodes = processes.back().predict(rule.nodes);
    loss.regularizer += regularizer_from_moments(at_nodes, rule, config.regularizer,
                                                 std::span(reg_d_mean).subspan(c * nodes, nodes),
                                                 std::span(reg_d_variance).subspan(c * nodes, nodes));
  }
  const auto uce = uce_loss_approx(mean, variance, event.object);
  loss.uce = uce.value;
  loss.total = loss.uce + loss.regularizer;
  if (!std::isfinite(loss.total)) {
    throw Error(ErrorCategory::kNumeric, "non-finite loss for event (" + std::to_string(event.subject) + ", " +
                                             std::to_string(event.predicate) + ", " + std::to_string(event.object) +
                                             ", " + std::to_string(event.time) + ")");
  }
  if (!grad) return loss;

  // Query offset first, quadrature nodes after it.
  std::vector<double> taus;
  taus.reserve(nodes + 1);
  taus.push_back(tau_star);
  taus.insert(taus.end(), rule.nodes.begin(), rule.nodes.end());
  std::vector<double> d_mean(nodes + 1), d_variance(nodes + 1);
  std::vector<PseudoPoint> d_points(points.all().size(), PseudoPoint{0.0, 0.0, 0.0});
  double d_gamma = 0.0;
  const auto per = params.shape.pseudo_points;
  for (std::size_t c = 0; c < candidates; ++c) {
    d_mean[0] = grad_scale * uce.d_mean[static_cast<Eigen::Index>(c)];
    d_variance[0] = grad_scale * uce.d_variance[static_cast<Eigen::Index>(c)];
    for (std::size_t k = 0; k < nodes; ++k) {
      d_mean[k + 1] = grad_scale * reg_d_mean[c * nodes + k];
      d_variance[k + 1] = grad_scale * reg_d_variance[c * nodes + k];
    }
    const auto g = processes[c].backward(taus, d_mean, d_variance);
    std::copy(g.points.begin(), g.points.end(), d_points.begin() + static_cast<std::ptrdiff_t>(c * per));
    d_gamma += g.gamma;
  }
  grad->gamma_raw += d_gamma * params.gamma_derivative();
  const auto d_state = generate_pseudo_points_backward(params.heads, head_trace, d_points, grad->heads);
  encode_history_backward(window, params, encoder_trace, d_state, *grad);
  return loss;
}

}  // namespace wgpnn
