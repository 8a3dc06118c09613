#include "grapes/adam.hpp"

#include <cmath>

#include "grapes/error.hpp"

namespace grapes {

void adam_step(std::vector<Tensor>& params, AdamState& state) {
  if (state.first_moment.empty()) {
    state.first_moment.resize(params.size());
    state.second_moment.resize(params.size());
    for (size_t p = 0; p < params.size(); ++p) {
      state.first_moment[p].assign(params[p].data().size(), 0.0);
      state.second_moment[p].assign(params[p].data().size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size())
    throw shape_error("adam_step: parameter list changed size across steps");

  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

  for (size_t p = 0; p < params.size(); ++p) {
    auto& value = params[p].data();
    const auto& grad = params[p].grad();
    auto& m = state.first_moment[p];
    auto& v = state.second_moment[p];
    if (m.size() != value.size())
      throw shape_error("adam_step: moment shape does not match parameter shape");
    for (size_t i = 0; i < value.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * grad[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      value[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

void zero_grads(std::vector<Tensor>& params) {
  for (auto& p : params) p.zero_grad();
}

}  // namespace grapes
