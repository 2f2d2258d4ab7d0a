#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "wgpnn/error.hpp"
#include "wgpnn/train.hpp"

using namespace wgpnn;
using namespace wgpnn::testing;

namespace {

std::vector<Quadruple> events_at(std::initializer_list<std::pair<Timestamp, std::size_t>> counts) {
  std::vector<Quadruple> out;
  for (const auto& [t, n] : counts) {
    for (std::size_t i = 0; i < n; ++i) out.push_back({0, 0, static_cast<EntityId>(i), t});
  }
  return out;
}

std::vector<double> flatten(const ModelParams& p) {
  std::vector<double> out;
  for (const auto& b : p.blocks()) out.insert(out.end(), b.values.begin(), b.values.end());
  return out;
}

}  // namespace

TEST_CASE("split_by_time cuts on timestamp boundaries") {
  std::vector<std::pair<Timestamp, std::size_t>> layout;
  const auto events = events_at({{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}, {7, 1}, {8, 1}, {9, 1}});
  const auto s = split_by_time(events);
  CHECK(s.train.size() == 8);
  CHECK(s.valid.size() == 1);
  CHECK(s.test.size() == 1);

  // A timestamp straddling the cut stays in the earlier split.
  const auto lumpy = split_by_time(events_at({{0, 2}, {1, 7}, {2, 1}, {3, 1}}));
  CHECK(lumpy.train.size() == 9);
  CHECK(lumpy.valid.size() == 1);
  CHECK(lumpy.test.size() == 1);

  // Every split keeps at least one timestamp.
  const auto skewed = split_by_time(events_at({{0, 100}, {1, 1}, {2, 1}}));
  CHECK(skewed.train.size() == 100);
  CHECK(skewed.valid.size() == 1);
  CHECK(skewed.test.size() == 1);

  CHECK_THROWS_AS(split_by_time(events_at({{0, 5}, {1, 5}})), Error);
}

TEST_CASE("property: splits partition the input in time order") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Quadruple> events;
    const int stamps = 3 + trial;
    for (Timestamp t = 0; t < stamps; ++t) {
      const auto n = 1 + rng() % 5;
      for (std::size_t i = 0; i < n; ++i) events.push_back({0, 0, 0, t * 3});
    }
    const auto s = split_by_time(events);
    CHECK(s.train.size() + s.valid.size() + s.test.size() == events.size());
    REQUIRE(!s.train.empty());
    REQUIRE(!s.valid.empty());
    REQUIRE(!s.test.empty());
    CHECK(s.train.back().time < s.valid.front().time);
    CHECK(s.valid.back().time < s.test.front().time);
  }
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  const auto data = synthetic_dataset({.horizon = 20});
  TrainConfig config;
  config.embedding_dim = 8;
  config.learning_rate = 0.0;
  auto state = initial_trainer_state(model_shape(config, data.meta.num_entities, data.num_predicates()), 1);
  const auto before = flatten(state.params);
  const auto forward = forward_config(config, data.meta.time_unit, data.meta.tau_max);
  const auto result = train_epoch(state, data.store, data.events.train, config, forward);
  CHECK(flatten(state.params) == before);
  CHECK(result.steps > 0);
  CHECK(state.epoch == 1);
}

TEST_CASE("training is deterministic") {
  const auto data = synthetic_dataset({.horizon = 30});
  TrainConfig config;
  config.embedding_dim = 8;
  config.batch_size = 16;
  config.learning_rate = 0.01;
  const auto forward = forward_config(config, data.meta.time_unit, data.meta.tau_max);
  const auto run = [&] {
    auto state = initial_trainer_state(model_shape(config, data.meta.num_entities, data.num_predicates()), 5);
    for (int e = 0; e < 2; ++e) train_epoch(state, data.store, data.events.train, config, forward);
    return flatten(state.params);
  };
  CHECK(run() == run());
}

TEST_CASE("single-event memorization drives the loss down") {
  const auto data = synthetic_dataset({.horizon = 20});
  TrainConfig config;
  config.embedding_dim = 8;
  config.learning_rate = 0.02;
  const auto forward = forward_config(config, data.meta.time_unit, data.meta.tau_max);
  auto state = initial_trainer_state(model_shape(config, data.meta.num_entities, data.num_predicates()), 9);
  const std::vector<Quadruple> one = {data.events.train.back()};
  const auto mean_of_target = [&] {
    const auto p = predict(state.params, data.store, {one[0].subject, one[0].predicate, one[0].time}, forward);
    return p.scores.mean[one[0].object];
  };
  const double first = event_loss(state.params, data.store, one[0], forward).total;
  const double mu_before = mean_of_target();
  double previous = first;
  int decreases = 0;
  for (int step = 0; step < 10; ++step) {
    train_epoch(state, data.store, one, config, forward);
    const double now = event_loss(state.params, data.store, one[0], forward).total;
    decreases += now < previous ? 1 : 0;
    previous = now;
  }
  CHECK(previous < first);
  CHECK(decreases >= 8);
  CHECK(mean_of_target() > mu_before);
}

TEST_CASE("training never reads history at or after the event time") {
  const auto data = synthetic_dataset({.horizon = 30});
  TrainConfig config;
  config.embedding_dim = 4;
  const auto forward = forward_config(config, data.meta.time_unit, data.meta.tau_max);
  auto state = initial_trainer_state(model_shape(config, data.meta.num_entities, data.num_predicates()), 2);
  std::size_t observed = 0;
  train_epoch(state, data.store, data.events.train, config, forward, [&](const Quadruple& q, const HistoryWindow& w) {
    ++observed;
    CHECK(w.entries.size() <= config.window_size);
    for (const auto& e : w.entries) CHECK(e.time < q.time);
  });
  CHECK(observed == data.events.train.size());
}

TEST_CASE("end-to-end gradients match finite differences") {
  std::size_t instances = 0;
  for (std::uint64_t seed = 1; instances < 20 && seed < 200; ++seed) {
    const auto outcome = end_to_end_gradient_check(seed);
    if (outcome.skipped) continue;
    ++instances;
    CHECK_MESSAGE(outcome.max_error <= 1e-4, "seed ", seed, " worst ", outcome.worst, " error ", outcome.max_error, " analytic ",
                  outcome.worst_analytic, " numeric ", outcome.worst_numeric);
  }
  CHECK(instances == 20);
}

TEST_CASE("config validation rejects bad values") {
  TrainConfig c;
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.quad_points = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.jitter = 0.1;
  CHECK_THROWS_AS(c.validate(), Error);
}
