#pragma once

#include "recourse/numerics/matrix.hpp"

namespace recourse {

inline constexpr double kProbabilityClamp = 1e-7;

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // d loss / d pred, same shape as pred
};

// Mean binary cross-entropy over every element; predictions are clamped to
// [1e-7, 1 - 1e-7] before the logs.
LossResult bce_loss(const Matrix& pred, const Matrix& target);

// Mean squared error over every element.
LossResult mse_loss(const Matrix& pred, const Matrix& target);

}  // namespace recourse
