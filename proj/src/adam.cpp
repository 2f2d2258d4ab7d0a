#include "wgpnn/adam.hpp"

#include <cmath>

#include "wgpnn/error.hpp"

namespace wgpnn {

AdamState AdamState::for_params(const ModelParams& params) {
  AdamState state;
  for (const auto& block : params.blocks()) {
    const auto n = static_cast<Eigen::Index>(block.values.size());
    state.first_moment.push_back(Eigen::VectorXd::Zero(n));
    state.second_moment.push_back(Eigen::VectorXd::Zero(n));
  }
  return state;
}

void adam_step(ModelParams& params, const ModelParams& gradients, AdamState& state, const AdamConfig& config) {
  if (!(config.learning_rate >= 0.0)) throw Error(ErrorCategory::kConfig, "adam: learning rate must be >= 0");
  auto blocks = params.blocks();
  const auto grads = gradients.blocks();
  if (grads.size() != blocks.size() || state.first_moment.size() != blocks.size()) {
    throw Error(ErrorCategory::kCompatibility, "adam: parameter/gradient/state block count mismatch");
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (grads[b].values.size() != blocks[b].values.size() ||
        static_cast<std::size_t>(state.first_moment[b].size()) != blocks[b].values.size()) {
      throw Error(ErrorCategory::kCompatibility, "adam: shape mismatch in block " + blocks[b].name);
    }
    for (const double g : grads[b].values) {
      if (!std::isfinite(g)) throw Error(ErrorCategory::kNumeric, "adam: non-finite gradient in block " + grads[b].name);
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto values = blocks[b].values;
    const auto g = grads[b].values;
    auto& m = state.first_moment[b];
    auto& v = state.second_moment[b];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[i];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      values[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace wgpnn
