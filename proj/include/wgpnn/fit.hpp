#pragma once

#include <functional>

#include "wgpnn/evaluate.hpp"
#include "wgpnn/prepared.hpp"
#include "wgpnn/train.hpp"

namespace wgpnn {

/// Early-stopping bookkeeping carried across epochs (and checkpoints).
struct FitProgress {
  double best_valid_mrr = -1.0;
  std::size_t best_epoch = 0;
  std::size_t stale_epochs = 0;
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  /// Time-aware filtered MRR over all validation queries.
  double valid_mrr = 0.0;
  bool improved = false;
};

using EpochCallback = std::function<void(const TrainerState&, const EpochLog&, const FitProgress&)>;

/// Trains until `config.epochs` total epochs or until `patience` epochs pass
/// without a validation improvement. Resumes from `state.epoch`.
FitProgress fit(TrainerState& state, const Dataset& dataset, const TrainConfig& config, FitProgress progress,
                const EpochCallback& on_epoch = {}, const EvaluateOptions& eval = {});

}  // namespace wgpnn
