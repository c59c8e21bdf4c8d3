#include "recourse/numerics/mlp.hpp"

#include <cmath>

#include "recourse/error.hpp"

namespace recourse {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  return "linear";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "linear") return Activation::linear;
  throw SpecError("unknown activation '" + std::string(name) + "'");
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) throw SpecError("MlpSpec needs at least two layer sizes");
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw SpecError("MlpSpec layer sizes must be positive");
  }
  if (activations.size() != layer_sizes.size() - 1) {
    throw SpecError("MlpSpec needs one activation per non-input layer");
  }
}

std::size_t MlpParams::parameter_count() const {
  std::size_t count = 0;
  for (const auto& l : layers) count += l.weights.size() + l.bias.size();
  return count;
}

bool MlpParams::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weights.all_finite() || !recourse::all_finite(l.bias)) return false;
  }
  return true;
}

MlpParams zeros_like(const MlpSpec& spec) {
  spec.validate();
  MlpParams p{spec, {}};
  p.layers.reserve(spec.layer_count());
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    p.layers.push_back({Matrix(spec.layer_sizes[l + 1], spec.layer_sizes[l]),
                        Vector(spec.layer_sizes[l + 1], 0.0)});
  }
  return p;
}

MlpParams init_params(const MlpSpec& spec, Rand& rng) {
  MlpParams p = zeros_like(spec);
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const double fan_in = static_cast<double>(spec.layer_sizes[l]);
    const double fan_out = static_cast<double>(spec.layer_sizes[l + 1]);
    const double std = spec.activations[l] == Activation::relu ? std::sqrt(2.0 / fan_in)
                                                               : std::sqrt(2.0 / (fan_in + fan_out));
    for (double& w : p.layers[l].weights.values()) w = rng.normal(0.0, std);
  }
  return p;
}

namespace {

void check_input(const MlpParams& params, const Matrix& batch) {
  if (params.layers.empty() || params.layers.size() != params.spec.layer_count()) {
    throw SpecError("mlp: parameters do not match their spec");
  }
  if (batch.cols() != params.spec.input_width()) {
    throw SpecError("mlp: batch width " + std::to_string(batch.cols()) + " != input width " +
                    std::to_string(params.spec.input_width()));
  }
  // relu maps NaN to 0, so a bad input would not show up in the output.
  if (!batch.all_finite()) throw NumericError("mlp: non-finite input");
}

}  // namespace

ForwardCache mlp_forward(const MlpParams& params, const Matrix& batch) {
  check_input(params, batch);
  const std::size_t depth = params.layers.size();
  ForwardCache cache;
  cache.activations.resize(depth + 1);
  cache.pre_activations.resize(depth);
  cache.activations[0] = batch;
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& layer = params.layers[l];
    kernels::affine_forward(cache.activations[l], layer.weights, layer.bias, cache.pre_activations[l]);
    kernels::activate(params.spec.activations[l], cache.pre_activations[l], cache.activations[l + 1]);
  }
  if (!cache.output().all_finite()) throw NumericError("mlp_forward: non-finite output");
  return cache;
}

Matrix mlp_predict(const MlpParams& params, const Matrix& batch) {
  check_input(params, batch);
  Matrix z;
  Matrix a;
  const Matrix* in = &batch;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    kernels::affine_forward(*in, layer.weights, layer.bias, z);
    kernels::activate(params.spec.activations[l], z, a);
    in = &a;
  }
  if (!a.all_finite()) throw NumericError("mlp_predict: non-finite output");
  return a;
}

namespace {

void check_cache(const MlpParams& params, const ForwardCache& cache, const Matrix& output_grad) {
  const std::size_t depth = params.layers.size();
  if (cache.activations.size() != depth + 1 || cache.pre_activations.size() != depth) {
    throw SpecError("mlp_backward: cache does not match network depth");
  }
  for (std::size_t l = 0; l <= depth; ++l) {
    if (cache.activations[l].cols() != params.spec.layer_sizes[l] ||
        cache.activations[l].rows() != cache.activations[0].rows()) {
      throw SpecError("mlp_backward: stale cache (layer " + std::to_string(l) + " shape)");
    }
  }
  if (output_grad.rows() != cache.output().rows() || output_grad.cols() != cache.output().cols()) {
    throw SpecError("mlp_backward: output gradient shape mismatch");
  }
}

}  // namespace

Gradients mlp_backward(const MlpParams& params, const ForwardCache& cache, const Matrix& output_grad) {
  check_cache(params, cache, output_grad);
  Gradients g{zeros_like(params.spec), {}};
  Matrix upstream = output_grad;
  Matrix dz;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    kernels::activate_backward(params.spec.activations[l], cache.pre_activations[l],
                               cache.activations[l + 1], upstream, dz);
    kernels::weight_grad(dz, cache.activations[l], g.params.layers[l].weights, g.params.layers[l].bias);
    kernels::input_grad(dz, params.layers[l].weights, upstream);
  }
  g.input = std::move(upstream);
  return g;
}

Matrix mlp_input_gradient(const MlpParams& params, const ForwardCache& cache,
                          const Matrix& output_grad) {
  check_cache(params, cache, output_grad);
  Matrix upstream = output_grad;
  Matrix dz;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    kernels::activate_backward(params.spec.activations[l], cache.pre_activations[l],
                               cache.activations[l + 1], upstream, dz);
    kernels::input_grad(dz, params.layers[l].weights, upstream);
  }
  return upstream;
}

}  // namespace recourse
