#include "recourse/numerics/adam.hpp"

#include <cmath>

#include "recourse/error.hpp"

namespace recourse {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0) || !(epsilon > 0.0) || beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 ||
      beta2 >= 1.0 || weight_decay < 0.0) {
    throw SpecError("invalid Adam hyperparameters");
  }
}

AdamState make_adam_state(const MlpParams& params, AdamConfig config) {
  config.validate();
  return AdamState{config, zeros_like(params.spec), zeros_like(params.spec), 0};
}

namespace {
void update(std::span<double> p, std::span<const double> g, std::span<double> m, std::span<double> v,
            const AdamConfig& c, double correction1, double correction2, double decay) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] -= c.learning_rate * decay * p[k];
    m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
    v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
    const double m_hat = m[k] / correction1;
    const double v_hat = v[k] / correction2;
    p[k] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}
}  // namespace

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state) {
  if (grads.spec != params.spec || state.first_moment.spec != params.spec) {
    throw SpecError("adam_step: shape mismatch");
  }
  if (!grads.all_finite()) throw NumericError("adam_step: non-finite gradient");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.config.beta1, t);
  const double c2 = 1.0 - std::pow(state.config.beta2, t);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& layer = params.layers[l];
    update(layer.weights.values(), grads.layers[l].weights.values(),
           state.first_moment.layers[l].weights.values(), state.second_moment.layers[l].weights.values(),
           state.config, c1, c2, state.config.weight_decay);
    update(layer.bias, grads.layers[l].bias, state.first_moment.layers[l].bias,
           state.second_moment.layers[l].bias, state.config, c1, c2, 0.0);
  }
}

}  // namespace recourse
