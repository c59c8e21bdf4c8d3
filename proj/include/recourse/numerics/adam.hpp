#pragma once

#include <cstdint>

#include "recourse/numerics/mlp.hpp"

namespace recourse {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Decoupled weight decay on weight matrices (biases are not decayed).
  double weight_decay = 0.0;

  void validate() const;
};

struct AdamState {
  AdamConfig config;
  MlpParams first_moment;
  MlpParams second_moment;
  std::uint64_t step = 0;
};

AdamState make_adam_state(const MlpParams& params, AdamConfig config = {});

// Bias-corrected Adam update, applied in place. Throws NumericError on
// non-finite gradients without touching params or state.
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state);

}  // namespace recourse
