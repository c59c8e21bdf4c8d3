#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>

#include "recourse/numerics/mlp.hpp"
#include "recourse/predictors/training.hpp"
#include "recourse/profiles/dataset.hpp"

namespace recourse {

// Latent encodings of the training rows of one class, in canonical
// (lexicographic) order so lookups do not depend on dataset row order.
struct PrototypeSet {
  int target_class = 1;
  std::size_t k = 5;
  Matrix encodings;  // class rows x latent width
};

// Denoising autoencoder; its reconstruction error is the realism score.
struct AutoencoderModel {
  MlpParams encoder;  // width -> 16 relu -> 8 linear
  MlpParams decoder;  // 8 -> 16 relu -> width linear
  double noise_std = 0.1;
  std::shared_ptr<const ProfileSchema> schema;
  TrainingInfo info;
  std::optional<PrototypeSet> prototypes;  // attached for CSGP

  std::size_t latent_width() const { return encoder.spec.output_width(); }
};

inline constexpr double kDefaultAeNoiseStd = 0.1;
inline constexpr std::size_t kDefaultLatentWidth = 8;

// Defaults used by the CLI for the autoencoder (the classifier uses TrainConfig{}).
TrainConfig default_autoencoder_config();

// Trains to reconstruct clean rows from copies corrupted by N(0, noise_std).
// Throws SpecError for noise_std <= 0 and TrainingError on divergence.
AutoencoderModel train_autoencoder(const Dataset& train, double noise_std, const TrainConfig& config, Rand& rng);

Matrix encode(const AutoencoderModel& ae, const Matrix& rows);
Vector encode(const AutoencoderModel& ae, std::span<const double> x);
Matrix reconstruct(const AutoencoderModel& ae, const Matrix& rows);

// ||decode(encode(x)) - x||^2
double reconstruction_error(const AutoencoderModel& ae, std::span<const double> x);
inline double reconstruction_error(const AutoencoderModel& ae, const NormalizedProfile& x) {
  return reconstruction_error(ae, x.values);
}
Vector reconstruction_errors(const AutoencoderModel& ae, const Matrix& rows);

}  // namespace recourse
