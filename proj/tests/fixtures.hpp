#pragma once

// Shared datasets and checks for the unit tests and the acceptance suite.

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "gradient_check.hpp"
#include "wgpnn/activations.hpp"
#include "wgpnn/model.hpp"
#include "wgpnn/neural.hpp"
#include "wgpnn/prepared.hpp"
#include "wgpnn/synth.hpp"

namespace wgpnn::testing {

inline Dataset synthetic_dataset(const SynthSpec& spec, double train_fraction = 0.8, double valid_fraction = 0.1) {
  std::stringstream tsv;
  SyntheticGenerator(spec).write_tsv(tsv);
  auto parsed = parse_quadruples(tsv);
  auto splits = split_by_time(parsed.quadruples, train_fraction, valid_fraction);
  return build_dataset(std::move(parsed.entities), std::move(parsed.predicates), std::move(splits));
}

struct GradientCheckOutcome {
  /// The instance sat near a non-differentiable point and was not checked.
  bool skipped = false;
  double max_error = 0.0;
  std::string worst;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// End-to-end check of event_loss gradients against central differences on a
/// micro instance (d=4, N=2, C=3, window <= 3), over every parameter.
inline GradientCheckOutcome end_to_end_gradient_check(std::uint64_t seed, double eps = 1e-5) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<EntityId> entity(0, 2);
  std::uniform_int_distribution<int> coin(0, 1);
  std::normal_distribution<double> normal;

  std::vector<Quadruple> facts;
  for (Timestamp t = 0; t < 4; ++t) {
    for (EntityId s = 0; s < 3; ++s) {
      if (coin(rng)) facts.push_back({s, 0, entity(rng), t});
    }
  }
  facts = add_reciprocals(facts, 1);
  const GraphStore store(build_slices(facts));
  const Quadruple event{entity(rng), static_cast<PredicateId>(coin(rng)), entity(rng), 4 + coin(rng)};

  ModelShape shape;
  shape.num_entities = 3;
  shape.num_predicates = 2;
  shape.embedding_dim = 4;
  shape.hidden_dim = 4;
  shape.pseudo_points = 2;
  auto params = ModelParams::initialized(shape, seed * 7919 + 1);
  for (long i = 0; i < params.gru.bias.size(); ++i) params.gru.bias[i] = 0.2 * normal(rng);
  for (DenseHead* head : {&params.heads.tau, &params.heads.logit, &params.heads.weight}) {
    for (long i = 0; i < head->bias.size(); ++i) head->bias[i] = 0.5 * normal(rng) + 0.2;
  }
  params.gamma_raw = inverse_softplus(std::uniform_real_distribution<double>(0.6, 1.4)(rng));

  ForwardConfig forward;
  forward.window_size = 3;
  forward.regularizer.alpha = 0.05;
  forward.regularizer.beta = 0.05;
  forward.regularizer.tau_max = 2.0;
  forward.regularizer.quad_points = 8;

  GradientCheckOutcome outcome;
  // Skip instances near min-weight ties, ReLU kinks, variance clamps or
  // nearly coincident pseudo-points.
  {
    const auto window = store.history(event.subject, event.predicate, event.time, forward.window_size);
    const auto state = encode_history(window, params);
    HeadTrace trace;
    const auto points = generate_pseudo_points(state, params.heads, 2, 3, &trace);
    for (long i = 0; i < trace.logit_pre.size(); ++i) outcome.skipped |= std::abs(trace.logit_pre[i]) < 1e-3;
    const auto kernel = forward.kernel(params);
    const double tau_star = query_offset(window, event.time, 1, forward.regularizer.tau_max);
    const auto rule = trapezoid_rule(forward.regularizer);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto pts = points.candidate(c);
      outcome.skipped |= std::abs(pts[0].weight - pts[1].weight) < 1e-3;
      outcome.skipped |= std::abs(pts[0].tau - pts[1].tau) < 0.05;
      const WeightedGp gp(pts, kernel);
      outcome.skipped |= gp.jitter() != kernel.jitter;
      outcome.skipped |= gp.predict(tau_star).variance < 1e-6;
      for (const auto& m : gp.predict(rule.nodes)) outcome.skipped |= m.variance < 1e-6;
    }
  }
  if (outcome.skipped) return outcome;

  auto grad = ModelParams::zeros(shape);
  event_loss(params, store, event, forward, &grad);
  const auto objective = [&] { return event_loss(params, store, event, forward).total; };
  auto blocks = params.blocks();
  const auto grad_blocks = grad.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i = 0; i < blocks[b].values.size(); ++i) {
      const double numeric = central_difference(blocks[b].values[i], objective, eps);
      const double error = gradient_error(grad_blocks[b].values[i], numeric);
      ++outcome.checked;
      if (error > outcome.max_error) {
        outcome.max_error = error;
        outcome.worst = std::string(blocks[b].name) + "[" + std::to_string(i) + "]";
        outcome.worst_analytic = grad_blocks[b].values[i];
        outcome.worst_numeric = numeric;
      }
    }
  }
  return outcome;
}

/// 30 quadruples over 6 entities and 2 predicates, six per timestamp 0..4,
/// with several objects per (subject, predicate, time). Split 3/1/1 timestamps.
inline Dataset concurrent_dataset() {
  std::stringstream tsv;
  for (int t = 0; t < 5; ++t) {
    const auto line = [&](int s, int p, int o) {
      tsv << 'e' << s << "\tr" << p << "\te" << (o % 6) << '\t' << t * 10 << '\n';
    };
    line(0, 0, 1 + t);
    line(0, 0, 2 + t);
    line(0, 0, 3 + t);
    line(1, 1, 0 + t);
    line(1, 1, 4 + t);
    line(2, 0, 5 + 2 * t);
  }
  auto parsed = parse_quadruples(tsv);
  auto splits = split_by_time(parsed.quadruples, 0.6, 0.2);
  return build_dataset(std::move(parsed.entities), std::move(parsed.predicates), std::move(splits));
}

/// Filtered rank by scanning every event of every split for facts sharing
/// (s, p, t); the true object itself is never excluded.
inline double brute_force_filtered_rank(std::span<const double> scores, const Quadruple& q, const Dataset& data) {
  std::vector<bool> excluded(scores.size(), false);
  for (const auto* split : {&data.events.train, &data.events.valid, &data.events.test}) {
    for (const auto& e : *split) {
      if (e.subject == q.subject && e.predicate == q.predicate && e.time == q.time && e.object != q.object) {
        excluded[e.object] = true;
      }
    }
  }
  double rank = 1.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (c == q.object || excluded[c]) continue;
    if (scores[c] > scores[q.object]) rank += 1.0;
    if (scores[c] == scores[q.object]) rank += 0.5;
  }
  return rank;
}

}  // namespace wgpnn::testing
