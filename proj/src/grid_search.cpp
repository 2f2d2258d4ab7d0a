#include "wgpnn/grid_search.hpp"

#include <ostream>

#include "wgpnn/error.hpp"
#include "wgpnn/evaluate.hpp"

namespace wgpnn {

GridSpec GridSpec::full_space() { return {{4, 6, 8, 10}, {1, 2, 4, 6}, {200, 300}, {600, 800, 1000}}; }

std::vector<TrainConfig> GridSpec::expand(const TrainConfig& base) const {
  std::vector<TrainConfig> configs;
  for (const auto m : window_sizes) {
    for (const auto n : pseudo_points) {
      for (const auto d : embedding_dims) {
        for (const auto b : batch_sizes) {
          TrainConfig c = base;
          c.window_size = m;
          c.pseudo_points = n;
          c.embedding_dim = d;
          c.batch_size = b;
          configs.push_back(c);
        }
      }
    }
  }
  return configs;
}

GridSearchResult grid_search(const Dataset& dataset, std::span<const TrainConfig> configs, std::size_t budget_epochs) {
  if (configs.empty()) throw Error(ErrorCategory::kConfig, "grid search: empty grid");
  GridSearchResult result;
  EvaluateOptions options;
  options.num_raw_predicates = dataset.meta.num_raw_predicates;
  for (const auto& config : configs) {
    config.validate();
    const auto shape = model_shape(config, dataset.meta.num_entities, dataset.num_predicates());
    const auto forward = forward_config(config, dataset.meta.time_unit, dataset.meta.tau_max);
    auto state = initial_trainer_state(shape, config.seed);
    GridPoint point{config, 0.0, 0.0, 0.0, 0.0, 0.0};
    point.config.epochs = budget_epochs;
    for (std::size_t e = 0; e < budget_epochs; ++e) {
      point.final_loss = train_epoch(state, dataset.store, dataset.events.train, config, forward).mean_loss;
    }
    const auto report = evaluate(state.params, dataset.store, dataset.events.valid, dataset.filter, forward, options);
    point.valid_mrr = report.combined.filtered.mrr;
    point.valid_raw_mrr = report.combined.raw.mrr;
    point.valid_hits_at_3 = report.combined.filtered.hits_at_3;
    point.valid_hits_at_10 = report.combined.filtered.hits_at_10;
    result.points.push_back(point);
  }
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    const auto& a = result.points[i];
    const auto& b = result.points[result.best_index];
    const bool better =
        a.valid_mrr > b.valid_mrr ||
        (a.valid_mrr == b.valid_mrr &&
         (a.config.pseudo_points < b.config.pseudo_points ||
          (a.config.pseudo_points == b.config.pseudo_points && a.config.embedding_dim < b.config.embedding_dim)));
    if (better) result.best_index = i;
  }
  return result;
}

void write_grid_tsv(std::ostream& out, const GridSearchResult& result) {
  const auto old_precision = out.precision(10);
  out << "index\twindow_size\tpseudo_points\tembedding_dim\tbatch_size\tlearning_rate\tepochs\tfinal_loss\t"
         "valid_mrr_time_aware\tvalid_mrr_raw\tvalid_hits_at_3\tvalid_hits_at_10\tbest\n";
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& p = result.points[i];
    out << i << '\t' << p.config.window_size << '\t' << p.config.pseudo_points << '\t' << p.config.embedding_dim
        << '\t' << p.config.batch_size << '\t' << p.config.learning_rate << '\t' << p.config.epochs << '\t'
        << p.final_loss << '\t' << p.valid_mrr << '\t' << p.valid_raw_mrr << '\t' << p.valid_hits_at_3 << '\t'
        << p.valid_hits_at_10 << '\t' << (i == result.best_index ? 1 : 0) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace wgpnn
