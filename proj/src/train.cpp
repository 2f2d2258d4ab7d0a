#include "wgpnn/train.hpp"

#include <algorithm>
#include <cmath>

#include "wgpnn/error.hpp"

namespace wgpnn {

void TrainConfig::validate() const {
  const auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw Error(ErrorCategory::kConfig, std::string(name) + " must be positive");
  };
  positive(window_size, "window_size");
  positive(pseudo_points, "pseudo_points");
  positive(embedding_dim, "embedding_dim");
  positive(batch_size, "batch_size");
  if (quad_points < 2) throw Error(ErrorCategory::kConfig, "quad_points must be >= 2");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCategory::kConfig, "learning_rate must be finite and non-negative");
  }
  if (!(alpha >= 0.0 && beta >= 0.0 && nu >= 0.0)) {
    throw Error(ErrorCategory::kConfig, "alpha, beta and nu must be non-negative");
  }
  if (!(jitter >= 0.0 && jitter <= KernelParams::kMaxJitter)) {
    throw Error(ErrorCategory::kConfig, "jitter must lie in [0, 1e-3]");
  }
}

Splits split_by_time(std::span<const Quadruple> quadruples, double train_fraction, double valid_fraction) {
  if (!(train_fraction > 0.0 && valid_fraction > 0.0 && train_fraction + valid_fraction < 1.0)) {
    throw Error(ErrorCategory::kConfig, "split fractions must be positive and sum below 1");
  }
  // Distinct timestamps and the cumulative event count after each.
  std::vector<Timestamp> times;
  std::vector<std::size_t> cumulative;
  for (std::size_t i = 0; i < quadruples.size(); ++i) {
    if (i > 0 && quadruples[i].time < quadruples[i - 1].time) {
      throw Error(ErrorCategory::kParse, "split_by_time: quadruples are not sorted by time");
    }
    if (times.empty() || times.back() != quadruples[i].time) {
      times.push_back(quadruples[i].time);
      cumulative.push_back(0);
    }
    cumulative.back() = i + 1;
  }
  const std::size_t t = times.size();
  if (t < 3) {
    throw Error(ErrorCategory::kParse,
                "split_by_time: need at least 3 distinct timestamps, found " + std::to_string(t));
  }
  const double n = static_cast<double>(quadruples.size());
  const auto first_reaching = [&](double fraction) {
    const double target = fraction * n - 1e-9;
    const auto it = std::find_if(cumulative.begin(), cumulative.end(),
                                 [&](std::size_t c) { return static_cast<double>(c) >= target; });
    return static_cast<std::size_t>(it - cumulative.begin());
  };
  const std::size_t train_last = std::min(first_reaching(train_fraction), t - 3);
  const std::size_t valid_last =
      std::clamp(first_reaching(train_fraction + valid_fraction), train_last + 1, t - 2);

  Splits splits;
  for (const auto& q : quadruples) {
    if (q.time <= times[train_last]) {
      splits.train.push_back(q);
    } else if (q.time <= times[valid_last]) {
      splits.valid.push_back(q);
    } else {
      splits.test.push_back(q);
    }
  }
  return splits;
}

ModelShape model_shape(const TrainConfig& config, std::uint32_t num_entities, std::uint32_t num_predicates) {
  ModelShape shape;
  shape.num_entities = num_entities;
  shape.num_predicates = num_predicates;
  shape.embedding_dim = config.embedding_dim;
  shape.hidden_dim = config.embedding_dim;
  shape.pseudo_points = config.pseudo_points;
  return shape;
}

ForwardConfig forward_config(const TrainConfig& config, Timestamp time_unit, double tau_max) {
  ForwardConfig forward;
  forward.window_size = config.window_size;
  forward.time_unit = time_unit;
  forward.jitter = config.jitter;
  forward.regularizer.alpha = config.alpha;
  forward.regularizer.beta = config.beta;
  forward.regularizer.nu = config.nu;
  forward.regularizer.quad_points = config.quad_points;
  forward.regularizer.tau_max = config.tau_max > 0.0 ? config.tau_max : tau_max;
  return forward;
}

TrainerState initial_trainer_state(const ModelShape& shape, std::uint64_t seed) {
  TrainerState state{ModelParams::initialized(shape, seed), {}, 0};
  state.optimizer = AdamState::for_params(state.params);
  return state;
}

EpochResult train_epoch(TrainerState& state, const GraphStore& store, std::span<const Quadruple> events,
                        const TrainConfig& config, const ForwardConfig& forward, const EventObserver& observer) {
  config.validate();
  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  ModelParams grad = ModelParams::zeros(state.params.shape);
  EpochResult result;
  double loss_sum = 0.0;
  for (std::size_t begin = 0; begin < events.size(); begin += config.batch_size) {
    const std::size_t end = std::min(events.size(), begin + config.batch_size);
    const double scale = 1.0 / static_cast<double>(end - begin);
    grad.set_zero();
    for (std::size_t i = begin; i < end; ++i) {
      if (observer) {
        observer(events[i], store.history(events[i].subject, events[i].predicate, events[i].time,
                                          forward.window_size));
      }
      loss_sum += event_loss(state.params, store, events[i], forward, &grad, scale).total;
    }
    adam_step(state.params, grad, state.optimizer, adam);
    ++result.steps;
  }
  result.mean_loss = events.empty() ? 0.0 : loss_sum / static_cast<double>(events.size());
  ++state.epoch;
  return result;
}

}  // namespace wgpnn
