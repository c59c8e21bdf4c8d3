#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "recourse/numerics/kernels.hpp"
#include "recourse/numerics/matrix.hpp"
#include "recourse/numerics/rand.hpp"

namespace recourse {

std::string_view to_string(Activation act);
Activation activation_from_string(std::string_view name);

struct MlpSpec {
  std::vector<std::size_t> layer_sizes;  // input width first
  std::vector<Activation> activations;   // one per non-input layer

  // Throws SpecError on an empty spec, zero widths or an activation count mismatch.
  void validate() const;

  std::size_t input_width() const { return layer_sizes.front(); }
  std::size_t output_width() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return activations.size(); }

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Parameters of a dense network; also used for gradients and optimizer moments.
struct MlpParams {
  MlpSpec spec;
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const;
  bool all_finite() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

MlpParams zeros_like(const MlpSpec& spec);

// He-normal weights for relu layers, Xavier-normal otherwise; zero biases.
MlpParams init_params(const MlpSpec& spec, Rand& rng);

// Per-layer tensors kept for backprop.
struct ForwardCache {
  std::vector<Matrix> activations;  // [0] = input, [l+1] = output of layer l
  std::vector<Matrix> pre_activations;

  const Matrix& output() const { return activations.back(); }
};

ForwardCache mlp_forward(const MlpParams& params, const Matrix& batch);

// Forward pass that keeps no cache.
Matrix mlp_predict(const MlpParams& params, const Matrix& batch);

struct Gradients {
  MlpParams params;
  Matrix input;
};

// Backprop of a scalar loss whose gradient w.r.t. the network output is `output_grad`.
Gradients mlp_backward(const MlpParams& params, const ForwardCache& cache, const Matrix& output_grad);

// Gradient w.r.t. the input only; skips the weight-gradient kernels.
Matrix mlp_input_gradient(const MlpParams& params, const ForwardCache& cache,
                          const Matrix& output_grad);

}  // namespace recourse
