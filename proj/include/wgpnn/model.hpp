#pragma once

// The full per-query pipeline: history window -> GRU state -> pseudo-points
// -> per-candidate weighted GP at the query offset, and the per-event training
// loss with its gradient.

#include <Eigen/Core>

#include "wgpnn/graph_store.hpp"
#include "wgpnn/model_params.hpp"
#include "wgpnn/pseudo_point.hpp"
#include "wgpnn/wgp.hpp"

namespace wgpnn {

/// Settings the forward pass needs besides the learned parameters.
struct ForwardConfig {
  std::size_t window_size = 4;
  Timestamp time_unit = 1;
  double query_weight = 1.0;
  double jitter = 1e-8;
  RegularizerConfig regularizer;

  KernelParams kernel(const ModelParams& params) const { return {params.gamma(), query_weight, jitter}; }
};

/// log(1 + (t_q - t_last) / unit) for a non-empty window; for an empty one
/// log(1 + t_q / unit) capped at tau_max.
double query_offset(const HistoryWindow& window, Timestamp query_time, Timestamp time_unit, double tau_max);

struct Query {
  EntityId subject = 0;
  PredicateId predicate = 0;
  Timestamp time = 0;
};

struct Prediction {
  HistoryWindow window;
  double tau_star = 0.0;
  PseudoPointSet points;
  CandidateScores scores;
};

Prediction predict(const ModelParams& params, const GraphStore& store, const Query& query,
                   const ForwardConfig& config);

struct EventLoss {
  double total = 0.0;
  double uce = 0.0;
  double regularizer = 0.0;
};

/// Loss of one observed event: expected cross-entropy of the true object at
/// the query offset plus the regulariser summed over all candidates. When
/// `grad` is non-null, adds `grad_scale` * dLoss/dparams into it.
EventLoss event_loss(const ModelParams& params, const GraphStore& store, const Quadruple& event,
                     const ForwardConfig& config, ModelParams* grad = nullptr, double grad_scale = 1.0);

}  // namespace wgpnn
