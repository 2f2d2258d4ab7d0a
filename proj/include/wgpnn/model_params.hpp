#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wgpnn {

struct ModelShape {
  std::uint32_t num_entities = 0;
  /// Includes reciprocal predicates.
  std::uint32_t num_predicates = 0;
  std::size_t embedding_dim = 32;
  std::size_t hidden_dim = 32;
  std::size_t pseudo_points = 2;

  std::size_t candidates() const noexcept { return num_entities; }
  std::size_t encoder_input_dim() const noexcept { return 3 * embedding_dim; }

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Embedding vectors are stored column-wise: entity.col(id).
struct EmbeddingTable {
  Eigen::MatrixXd entity;
  Eigen::MatrixXd predicate;
};

/// Gated recurrent unit weights. Row blocks of `input`, `recurrent` and
/// `bias` are ordered [reset, update, candidate], each hidden_dim tall.
struct GruWeights {
  Eigen::MatrixXd input;
  Eigen::MatrixXd recurrent;
  Eigen::VectorXd bias;
};

/// Affine map hidden_dim -> pseudo_points * candidates, candidate-major.
struct DenseHead {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

struct PseudoPointHeads {
  DenseHead tau;
  DenseHead logit;
  DenseHead weight;
};

/// A named, contiguous view into one parameter tensor.
template <typename T>
struct BasicParamBlock {
  std::string name;
  std::span<T> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
};
using ParamBlock = BasicParamBlock<double>;
using ConstParamBlock = BasicParamBlock<const double>;

struct ModelParams {
  ModelShape shape;
  EmbeddingTable embeddings;
  GruWeights gru;
  PseudoPointHeads heads;
  /// Kernel bandwidth before the softplus that keeps it positive.
  double gamma_raw = 0.0;

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases, gamma = 1.
  static ModelParams initialized(const ModelShape& shape, std::uint64_t seed);
  static ModelParams zeros(const ModelShape& shape);

  double gamma() const;
  /// d gamma / d gamma_raw.
  double gamma_derivative() const;

  std::vector<ParamBlock> blocks();
  std::vector<ConstParamBlock> blocks() const;
  std::size_t parameter_count() const;

  void set_zero();
};

}  // namespace wgpnn
