#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wgpnn/adam.hpp"
#include "wgpnn/graph_store.hpp"
#include "wgpnn/model.hpp"
#include "wgpnn/model_params.hpp"

namespace wgpnn {

struct TrainConfig {
  /// Past active slices fed to the encoder (M).
  std::size_t window_size = 4;
  /// Pseudo-points per candidate (N).
  std::size_t pseudo_points = 2;
  /// Embedding size; the GRU hidden size follows it.
  std::size_t embedding_dim = 32;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double alpha = 1e-3;
  double beta = 1e-3;
  double nu = 1.0;
  std::size_t epochs = 50;
  std::uint64_t seed = 42;
  /// Validation checks without improvement before stopping; 0 disables.
  std::size_t patience = 3;
  std::size_t quad_points = 16;
  double jitter = 1e-8;
  /// Regulariser horizon; <= 0 means "use the dataset's statistic".
  double tau_max = 0.0;

  void validate() const;
};

struct Splits {
  std::vector<Quadruple> train;
  std::vector<Quadruple> valid;
  std::vector<Quadruple> test;
};

/// Splits time-sorted quadruples into train/valid/test along timestamp
/// boundaries. A timestamp that straddles a cut goes to the earlier split;
/// each split keeps at least one timestamp.
Splits split_by_time(std::span<const Quadruple> quadruples, double train_fraction = 0.8,
                     double valid_fraction = 0.1);

ModelShape model_shape(const TrainConfig& config, std::uint32_t num_entities, std::uint32_t num_predicates);
ForwardConfig forward_config(const TrainConfig& config, Timestamp time_unit, double tau_max);

struct TrainerState {
  ModelParams params;
  AdamState optimizer;
  std::size_t epoch = 0;
};

TrainerState initial_trainer_state(const ModelShape& shape, std::uint64_t seed);

/// Observer invoked once per event during training, before its loss; lets
/// tests assert temporal hygiene.
using EventObserver = std::function<void(const Quadruple&, const HistoryWindow&)>;

struct EpochResult {
  double mean_loss = 0.0;
  std::size_t steps = 0;
};

/// One pass over `events` (time-sorted) in consecutive batches of
/// batch_size; each batch's mean gradient drives one Adam step.
EpochResult train_epoch(TrainerState& state, const GraphStore& store, std::span<const Quadruple> events,
                        const TrainConfig& config, const ForwardConfig& forward,
                        const EventObserver& observer = {});

}  // namespace wgpnn
