#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "wgpnn/model_params.hpp"

namespace wgpnn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moment estimates, one vector per parameter block.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<Eigen::VectorXd> first_moment;
  std::vector<Eigen::VectorXd> second_moment;

  static AdamState for_params(const ModelParams& params);
};

/// One bias-corrected Adam update. Throws (naming the block) before touching
/// any parameter if a gradient entry is not finite.
void adam_step(ModelParams& params, const ModelParams& gradients, AdamState& state, const AdamConfig& config);

}  // namespace wgpnn
