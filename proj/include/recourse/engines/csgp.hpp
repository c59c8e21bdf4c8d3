#pragma once

#include <cstddef>

#include "recourse/engines/result.hpp"
#include "recourse/predictors/autoencoder.hpp"

namespace recourse {

// Prototype-guided search over a masked perturbation d (x_cf = x + d):
//   pred_weight * (C(x_cf) - target_prob)^2 + l1_weight * ||d||_1 + l2_weight * ||d||_2^2
//   + proto_weight * ||encode(x_cf) - proto(x)||^2 + ae_weight * ||AE(x_cf) - x_cf||^2
struct CsgpConfig {
  double pred_weight = 1.0;
  double l1_weight = 0.1;
  double l2_weight = 0.1;
  double proto_weight = 0.5;
  double ae_weight = 0.5;
  std::size_t k = 5;
  double learning_rate = 0.01;
  std::size_t max_iters = 1000;
  double target_prob = 0.95;
  int target_class = 1;
  bool enforce_bounds = true;

  void validate() const;
};

// Runs max_iters plain gradient steps. Throws SpecError when the prototype
// set is for another class, NumericError on a non-finite iterate.
CfResult csgp_generate(const ClassifierModel& classifier, const AutoencoderModel& ae, const PrototypeSet& prototypes,
                       const RawProfile& x, const ProfileSchema& schema, const CsgpConfig& config = {});

}  // namespace recourse
