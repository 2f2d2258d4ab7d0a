#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "wgpnn/fit.hpp"
#include "wgpnn/grid_search.hpp"

using namespace wgpnn;
using namespace wgpnn::testing;

TEST_CASE("full grid has 96 points in a fixed order") {
  const auto configs = GridSpec::full_space().expand({});
  CHECK(configs.size() == 96);
  CHECK(configs.front().window_size == 4);
  CHECK(configs.front().pseudo_points == 1);
  CHECK(configs.back().window_size == 10);
  CHECK(configs.back().embedding_dim == 300);
  CHECK(configs.back().batch_size == 1000);
}

TEST_CASE("size-one grid returns its only point") {
  const auto data = synthetic_dataset({.horizon = 30});
  TrainConfig base;
  base.embedding_dim = 8;
  const GridSpec spec{{4}, {2}, {8}, {64}};
  const auto configs = spec.expand(base);
  REQUIRE(configs.size() == 1);
  const auto result = grid_search(data, configs, 1);
  CHECK(result.best_index == 0);
  CHECK(result.points.size() == 1);
  std::ostringstream out;
  write_grid_tsv(out, result);
  CHECK(out.str().find('\n') != std::string::npos);
}

TEST_CASE("a frozen config loses to a learning one") {
  const auto data = synthetic_dataset({.horizon = 60});
  TrainConfig learning;
  learning.embedding_dim = 16;
  learning.batch_size = 16;
  learning.learning_rate = 0.01;
  auto frozen = learning;
  frozen.learning_rate = 0.0;
  frozen.pseudo_points = 1;  // would win a tie
  const std::vector<TrainConfig> configs = {frozen, learning};
  const auto result = grid_search(data, configs, 15);
  CHECK(result.best_index == 1);
  CHECK(result.points[1].valid_mrr > result.points[0].valid_mrr);
}

TEST_CASE("fit stops on patience and resumes from progress") {
  const auto data = synthetic_dataset({.horizon = 30});
  TrainConfig config;
  config.embedding_dim = 8;
  config.learning_rate = 0.0;
  config.epochs = 20;
  config.patience = 2;
  auto state = initial_trainer_state(model_shape(config, data.meta.num_entities, data.num_predicates()), 1);
  std::vector<EpochLog> logs;
  const auto progress = fit(state, data, config, {}, [&](const TrainerState&, const EpochLog& log, const FitProgress&) {
    logs.push_back(log);
  });
  // Frozen weights: the first epoch sets the best, two stale epochs follow.
  CHECK(logs.size() == 3);
  CHECK(progress.best_epoch == 1);
  CHECK(progress.stale_epochs == 2);
  CHECK(state.epoch == 3);
  const auto again = fit(state, data, config, progress);
  CHECK(state.epoch == 3);
  CHECK(again.best_epoch == 1);
}
