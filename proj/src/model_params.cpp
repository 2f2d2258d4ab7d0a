#include "wgpnn/model_params.hpp"

#include <cmath>
#include <random>

#include "wgpnn/activations.hpp"

namespace wgpnn {

namespace {

template <typename Matrix>
void fill_uniform(Matrix& m, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
  }
}

template <typename T, typename Matrix>
BasicParamBlock<T> view(std::string name, Matrix& m) {
  return {std::move(name), std::span<T>(m.data(), static_cast<std::size_t>(m.size())),
          static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
}

template <typename T, typename Params>
std::vector<BasicParamBlock<T>> collect(Params& p) {
  std::vector<BasicParamBlock<T>> out;
  out.push_back(view<T>("embedding.entity", p.embeddings.entity));
  out.push_back(view<T>("embedding.predicate", p.embeddings.predicate));
  out.push_back(view<T>("gru.input", p.gru.input));
  out.push_back(view<T>("gru.recurrent", p.gru.recurrent));
  out.push_back(view<T>("gru.bias", p.gru.bias));
  out.push_back(view<T>("head.tau.weight", p.heads.tau.weight));
  out.push_back(view<T>("head.tau.bias", p.heads.tau.bias));
  out.push_back(view<T>("head.logit.weight", p.heads.logit.weight));
  out.push_back(view<T>("head.logit.bias", p.heads.logit.bias));
  out.push_back(view<T>("head.weight.weight", p.heads.weight.weight));
  out.push_back(view<T>("head.weight.bias", p.heads.weight.bias));
  out.push_back({"kernel.gamma_raw", std::span<T>(&p.gamma_raw, 1), 1, 1});
  return out;
}

}  // namespace

ModelParams ModelParams::zeros(const ModelShape& shape) {
  const auto d = static_cast<Eigen::Index>(shape.embedding_dim);
  const auto h = static_cast<Eigen::Index>(shape.hidden_dim);
  const auto in = static_cast<Eigen::Index>(shape.encoder_input_dim());
  const auto outputs = static_cast<Eigen::Index>(shape.pseudo_points * shape.candidates());
  ModelParams p;
  p.shape = shape;
  p.embeddings.entity = Eigen::MatrixXd::Zero(d, shape.num_entities);
  p.embeddings.predicate = Eigen::MatrixXd::Zero(d, shape.num_predicates);
  p.gru.input = Eigen::MatrixXd::Zero(3 * h, in);
  p.gru.recurrent = Eigen::MatrixXd::Zero(3 * h, h);
  p.gru.bias = Eigen::VectorXd::Zero(3 * h);
  for (DenseHead* head : {&p.heads.tau, &p.heads.logit, &p.heads.weight}) {
    head->weight = Eigen::MatrixXd::Zero(outputs, h);
    head->bias = Eigen::VectorXd::Zero(outputs);
  }
  p.gamma_raw = 0.0;
  return p;
}

ModelParams ModelParams::initialized(const ModelShape& shape, std::uint64_t seed) {
  ModelParams p = zeros(shape);
  std::mt19937_64 rng(seed);
  const double embed_bound = 1.0 / std::sqrt(static_cast<double>(shape.embedding_dim));
  const double input_bound = 1.0 / std::sqrt(static_cast<double>(shape.encoder_input_dim()));
  const double hidden_bound = 1.0 / std::sqrt(static_cast<double>(shape.hidden_dim));
  fill_uniform(p.embeddings.entity, embed_bound, rng);
  fill_uniform(p.embeddings.predicate, embed_bound, rng);
  fill_uniform(p.gru.input, input_bound, rng);
  fill_uniform(p.gru.recurrent, hidden_bound, rng);
  for (DenseHead* head : {&p.heads.tau, &p.heads.logit, &p.heads.weight}) {
    fill_uniform(head->weight, hidden_bound, rng);
  }
  p.gamma_raw = inverse_softplus(1.0);
  return p;
}

double ModelParams::gamma() const { return softplus(gamma_raw); }

double ModelParams::gamma_derivative() const { return sigmoid(gamma_raw); }

std::vector<ParamBlock> ModelParams::blocks() { return collect<double>(*this); }

std::vector<ConstParamBlock> ModelParams::blocks() const { return collect<const double>(*this); }

std::size_t ModelParams::parameter_count() const {
  std::size_t total = 0;
  for (const auto& b : blocks()) total += b.values.size();
  return total;
}

void ModelParams::set_zero() {
  for (auto& b : blocks()) std::fill(b.values.begin(), b.values.end(), 0.0);
}

}  // namespace wgpnn
