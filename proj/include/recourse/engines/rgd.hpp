#pragma once

#include <cstddef>

#include "recourse/engines/result.hpp"

namespace recourse {

// Regularized gradient descent over the counterfactual itself:
//   minimize (C(x_cf) - target_prob)^2 + l1_weight * ||x_cf - x||_1
// in normalized space, starting from x.
struct RgdConfig {
  double target_prob = 0.95;
  double l1_weight = 0.1;
  double learning_rate = 0.05;
  std::size_t max_iters = 1000;
  bool enforce_bounds = false;

  void validate() const;
};

// A step is rejected, and the step size halved, only when it raises both the
// prediction loss and the objective (accepted steps double the size again,
// capped at learning_rate);
// `loss_trace` records the prediction loss at the start and after every
// accepted step. Stops early once the prediction reaches target_prob.
// Throws NumericError (with the iteration index) on a non-finite iterate.
CfResult rgd_generate(const ClassifierModel& classifier, const RawProfile& x, const ProfileSchema& schema,
                      const RgdConfig& config = {});

}  // namespace recourse
