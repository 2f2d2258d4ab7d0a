#pragma once

// Differentiable encoder/decoder: neighbourhood mean aggregation, a GRU over
// the history window and three dense heads that decode pseudo-points. Every
// forward routine can record a trace that its *_backward counterpart consumes
// to accumulate gradients into a ModelParams of the same shape.

#include <span>

#include <Eigen/Core>

#include "wgpnn/graph_store.hpp"
#include "wgpnn/model_params.hpp"
#include "wgpnn/pseudo_point.hpp"

namespace wgpnn {

/// Element-wise mean of the embedding columns of `objects`. Throws on an
/// empty set.
Eigen::VectorXd aggregate_neighbors(std::span<const EntityId> objects, const Eigen::MatrixXd& entity);

/// Adds grad / |objects| to each contributing embedding column.
void aggregate_neighbors_backward(std::span<const EntityId> objects, const Eigen::VectorXd& grad,
                                  Eigen::MatrixXd& entity_grad);

struct GruStepCache {
  Eigen::VectorXd input;
  Eigen::VectorXd previous;
  Eigen::VectorXd reset;
  Eigen::VectorXd update;
  Eigen::VectorXd candidate;
};

/// h' = (1 - z) * n + z * h, with n = tanh(W_n x + U_n (r * h) + b_n).
Eigen::VectorXd gru_step(const GruWeights& cell, const Eigen::VectorXd& input,
                         const Eigen::VectorXd& previous, GruStepCache* cache = nullptr);

void gru_step_backward(const GruWeights& cell, const GruStepCache& cache, const Eigen::VectorXd& d_output,
                       GruWeights& grad, Eigen::VectorXd& d_input, Eigen::VectorXd& d_previous);

/// Cell input for one history entry: [e_s; e_p; mean of neighbour embeddings].
Eigen::VectorXd encoder_input(const HistoryEntry& entry, EntityId subject, PredicateId predicate,
                              const EmbeddingTable& table);

struct EncoderTrace {
  std::vector<GruStepCache> steps;
};

/// Runs the GRU once per window entry, oldest first, from the zero state.
Eigen::VectorXd encode_history(const HistoryWindow& window, const ModelParams& params,
                               EncoderTrace* trace = nullptr);

void encode_history_backward(const HistoryWindow& window, const ModelParams& params, const EncoderTrace& trace,
                             const Eigen::VectorXd& d_state, ModelParams& grad);

struct HeadTrace {
  Eigen::VectorXd state;
  Eigen::VectorXd tau_pre;
  Eigen::VectorXd logit_pre;
  Eigen::VectorXd weight_pre;
};

/// tau = softplus, logit = relu, weight = sigmoid of the respective affine
/// heads; output index c * N + j is pseudo-point j of candidate c.
PseudoPointSet generate_pseudo_points(const Eigen::VectorXd& state, const PseudoPointHeads& heads,
                                      std::size_t points_per_candidate, std::size_t candidates,
                                      HeadTrace* trace = nullptr);

/// `d_points` holds dLoss/d(tau, logit, weight) per pseudo-point in the same
/// layout as the forward output. Returns dLoss/dstate.
Eigen::VectorXd generate_pseudo_points_backward(const PseudoPointHeads& heads, const HeadTrace& trace,
                                                std::span<const PseudoPoint> d_points, PseudoPointHeads& grad);

}  // namespace wgpnn
