#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "wgpnn/prepared.hpp"
#include "wgpnn/train.hpp"

namespace wgpnn {

/// Cartesian hyperparameter grid over the settings that shape the model.
struct GridSpec {
  std::vector<std::size_t> window_sizes;
  std::vector<std::size_t> pseudo_points;
  std::vector<std::size_t> embedding_dims;
  std::vector<std::size_t> batch_sizes;

  /// M in {4,6,8,10}, N in {1,2,4,6}, d in {200,300}, batch in {600,800,1000}.
  static GridSpec full_space();

  /// One config per grid point on top of `base`, window size varying slowest.
  std::vector<TrainConfig> expand(const TrainConfig& base) const;
};

struct GridPoint {
  TrainConfig config;
  double final_loss = 0.0;
  double valid_mrr = 0.0;
  double valid_raw_mrr = 0.0;
  double valid_hits_at_3 = 0.0;
  double valid_hits_at_10 = 0.0;
};

struct GridSearchResult {
  std::vector<GridPoint> points;
  std::size_t best_index = 0;

  const TrainConfig& best() const { return points.at(best_index).config; }
};

/// Trains every config for `budget_epochs` epochs (no early stopping) and
/// picks the highest validation time-aware MRR; ties go to smaller N, then
/// smaller embedding size, then grid order.
GridSearchResult grid_search(const Dataset& dataset, std::span<const TrainConfig> configs, std::size_t budget_epochs);

void write_grid_tsv(std::ostream& out, const GridSearchResult& result);

}  // namespace wgpnn
