#include "wgpnn/neural.hpp"

#include "wgpnn/activations.hpp"
#include "wgpnn/error.hpp"

namespace wgpnn {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) { return x.unaryExpr([](double v) { return wgpnn::sigmoid(v); }); }

}  // namespace

Eigen::VectorXd aggregate_neighbors(std::span<const EntityId> objects, const Eigen::MatrixXd& entity) {
  if (objects.empty()) throw Error(ErrorCategory::kNumeric, "aggregate_neighbors: empty neighbour set");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(entity.rows());
  for (const EntityId o : objects) sum += entity.col(o);
  return sum / static_cast<double>(objects.size());
}

void aggregate_neighbors_backward(std::span<const EntityId> objects, const Eigen::VectorXd& grad,
                                  Eigen::MatrixXd& entity_grad) {
  const double share = 1.0 / static_cast<double>(objects.size());
  for (const EntityId o : objects) entity_grad.col(o) += share * grad;
}

Eigen::VectorXd gru_step(const GruWeights& cell, const Eigen::VectorXd& input, const Eigen::VectorXd& previous,
                         GruStepCache* cache) {
  const Eigen::Index h = previous.size();
  const Eigen::VectorXd projected = cell.input * input + cell.bias;
  const Eigen::VectorXd gates_pre = projected.head(2 * h) + cell.recurrent.topRows(2 * h) * previous;
  const Eigen::VectorXd reset = sigmoid(gates_pre.head(h));
  const Eigen::VectorXd update = sigmoid(gates_pre.tail(h));
  const Eigen::VectorXd candidate =
      (projected.tail(h) + cell.recurrent.bottomRows(h) * reset.cwiseProduct(previous)).array().tanh().matrix();
  Eigen::VectorXd output = (1.0 - update.array()).matrix().cwiseProduct(candidate) + update.cwiseProduct(previous);
  if (cache) *cache = {input, previous, reset, update, candidate};
  return output;
}

void gru_step_backward(const GruWeights& cell, const GruStepCache& cache, const Eigen::VectorXd& d_output,
                       GruWeights& grad, Eigen::VectorXd& d_input, Eigen::VectorXd& d_previous) {
  const Eigen::Index h = cache.previous.size();
  const auto& r = cache.reset;
  const auto& z = cache.update;
  const auto& n = cache.candidate;
  const auto& prev = cache.previous;

  const Eigen::VectorXd d_candidate = d_output.cwiseProduct((1.0 - z.array()).matrix());
  const Eigen::VectorXd d_update = d_output.cwiseProduct(prev - n);
  d_previous = d_output.cwiseProduct(z);

  Eigen::VectorXd d_pre(3 * h);
  d_pre.tail(h) = d_candidate.array() * (1.0 - n.array().square());
  const Eigen::VectorXd gated_prev = r.cwiseProduct(prev);
  grad.recurrent.bottomRows(h).noalias() += d_pre.tail(h) * gated_prev.transpose();
  const Eigen::VectorXd d_gated = cell.recurrent.bottomRows(h).transpose() * d_pre.tail(h);
  const Eigen::VectorXd d_reset = d_gated.cwiseProduct(prev);
  d_previous += d_gated.cwiseProduct(r);

  d_pre.head(h) = d_reset.array() * r.array() * (1.0 - r.array());
  d_pre.segment(h, h) = d_update.array() * z.array() * (1.0 - z.array());

  grad.input.noalias() += d_pre * cache.input.transpose();
  grad.bias += d_pre;
  grad.recurrent.topRows(2 * h).noalias() += d_pre.head(2 * h) * prev.transpose();
  d_previous.noalias() += cell.recurrent.topRows(2 * h).transpose() * d_pre.head(2 * h);
  d_input = cell.input.transpose() * d_pre;
}

Eigen::VectorXd encoder_input(const HistoryEntry& entry, EntityId subject, PredicateId predicate,
                              const EmbeddingTable& table) {
  const Eigen::Index d = table.entity.rows();
  Eigen::VectorXd x(3 * d);
  x.head(d) = table.entity.col(subject);
  x.segment(d, d) = table.predicate.col(predicate);
  x.tail(d) = aggregate_neighbors(entry.objects, table.entity);
  return x;
}

Eigen::VectorXd encode_history(const HistoryWindow& window, const ModelParams& params, EncoderTrace* trace) {
  Eigen::VectorXd state = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.shape.hidden_dim));
  if (trace) trace->steps.assign(window.entries.size(), {});
  for (std::size_t i = 0; i < window.entries.size(); ++i) {
    const auto x = encoder_input(window.entries[i], window.subject, window.predicate, params.embeddings);
    state = gru_step(params.gru, x, state, trace ? &trace->steps[i] : nullptr);
  }
  return state;
}

void encode_history_backward(const HistoryWindow& window, const ModelParams& params, const EncoderTrace& trace,
                             const Eigen::VectorXd& d_state, ModelParams& grad) {
  const Eigen::Index d = static_cast<Eigen::Index>(params.shape.embedding_dim);
  Eigen::VectorXd d_hidden = d_state;
  Eigen::VectorXd d_input;
  Eigen::VectorXd d_previous;
  for (std::size_t i = trace.steps.size(); i-- > 0;) {
    gru_step_backward(params.gru, trace.steps[i], d_hidden, grad.gru, d_input, d_previous);
    grad.embeddings.entity.col(window.subject) += d_input.head(d);
    grad.embeddings.predicate.col(window.predicate) += d_input.segment(d, d);
    aggregate_neighbors_backward(window.entries[i].objects, d_input.tail(d), grad.embeddings.entity);
    d_hidden = d_previous;
  }
}

PseudoPointSet generate_pseudo_points(const Eigen::VectorXd& state, const PseudoPointHeads& heads,
                                      std::size_t points_per_candidate, std::size_t candidates, HeadTrace* trace) {
  Eigen::VectorXd tau_pre = heads.tau.weight * state + heads.tau.bias;
  Eigen::VectorXd logit_pre = heads.logit.weight * state + heads.logit.bias;
  Eigen::VectorXd weight_pre = heads.weight.weight * state + heads.weight.bias;
  PseudoPointSet set(candidates, points_per_candidate);
  auto points = set.all();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    points[i] = {softplus(tau_pre[k]), relu(logit_pre[k]), sigmoid(weight_pre[k])};
  }
  if (trace) *trace = {state, std::move(tau_pre), std::move(logit_pre), std::move(weight_pre)};
  return set;
}

Eigen::VectorXd generate_pseudo_points_backward(const PseudoPointHeads& heads, const HeadTrace& trace,
                                                std::span<const PseudoPoint> d_points, PseudoPointHeads& grad) {
  const auto outputs = static_cast<Eigen::Index>(d_points.size());
  Eigen::VectorXd d_tau(outputs), d_logit(outputs), d_weight(outputs);
  for (Eigen::Index k = 0; k < outputs; ++k) {
    const auto& g = d_points[static_cast<std::size_t>(k)];
    d_tau[k] = g.tau * sigmoid(trace.tau_pre[k]);
    d_logit[k] = trace.logit_pre[k] > 0.0 ? g.logit : 0.0;
    const double w = sigmoid(trace.weight_pre[k]);
    d_weight[k] = g.weight * w * (1.0 - w);
  }
  Eigen::VectorXd d_state = Eigen::VectorXd::Zero(trace.state.size());
  const std::pair<const DenseHead*, DenseHead*> pairs[] = {
      {&heads.tau, &grad.tau}, {&heads.logit, &grad.logit}, {&heads.weight, &grad.weight}};
  const Eigen::VectorXd* deltas[] = {&d_tau, &d_logit, &d_weight};
  for (int i = 0; i < 3; ++i) {
    const auto& delta = *deltas[i];
    pairs[i].second->weight.noalias() += delta * trace.state.transpose();
    pairs[i].second->bias += delta;
    d_state.noalias() += pairs[i].first->weight.transpose() * delta;
  }
  return d_state;
}

}  // namespace wgpnn
