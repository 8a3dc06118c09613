#pragma once

#include <vector>

#include "grapes/tensor.hpp"

namespace grapes {

// Adam with bias correction. Moment buffers are keyed by position in the
// parameter list, so the same list must be passed on every step.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step_count = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// One update over the parameters' accumulated gradients.
void adam_step(std::vector<Tensor>& params, AdamState& state);

void zero_grads(std::vector<Tensor>& params);

}  // namespace grapes
