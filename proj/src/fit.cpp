#include "wgpnn/fit.hpp"

namespace wgpnn {

FitProgress fit(TrainerState& state, const Dataset& dataset, const TrainConfig& config, FitProgress progress,
                const EpochCallback& on_epoch, const EvaluateOptions& eval) {
  config.validate();
  const auto forward = forward_config(config, dataset.meta.time_unit, dataset.meta.tau_max);
  EvaluateOptions options = eval;
  options.num_raw_predicates = dataset.meta.num_raw_predicates;
  while (state.epoch < config.epochs) {
    if (config.patience > 0 && progress.stale_epochs >= config.patience) break;
    const auto result = train_epoch(state, dataset.store, dataset.events.train, config, forward);
    const auto report = evaluate(state.params, dataset.store, dataset.events.valid, dataset.filter, forward, options);
    EpochLog log{state.epoch, result.mean_loss, report.combined.filtered.mrr, false};
    if (log.valid_mrr > progress.best_valid_mrr) {
      progress.best_valid_mrr = log.valid_mrr;
      progress.best_epoch = state.epoch;
      progress.stale_epochs = 0;
      log.improved = true;
    } else {
      ++progress.stale_epochs;
    }
    if (on_epoch) on_epoch(state, log, progress);
  }
  return progress;
}

}  // namespace wgpnn
