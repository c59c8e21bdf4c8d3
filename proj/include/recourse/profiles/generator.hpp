#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "recourse/numerics/rand.hpp"
#include "recourse/profiles/dataset.hpp"

namespace recourse {

struct GeneratorConfig {
  std::size_t n_samples = 3029;
  double target_positive_rate = 0.43;
  std::uint64_t seed = 42;
  // Gives the Bayes-optimal rule about 0.85 accuracy on the unit-variance hidden score.
  double label_noise_std = 0.5;

  void validate() const;
};

// Everything the generator draws, including the hidden labelling rule.
struct SyntheticPopulation {
  Matrix raw;
  std::vector<int> labels;
  Vector hidden_score;  // unit-variance linear score over z-scored features
  double bias = 0.0;    // calibrated offset; label = [score + bias + noise > 0]
  double rate_tolerance = 0.0;

  // Accuracy of the noise-free rule score + bias > 0 against the drawn labels.
  double bayes_accuracy() const;
};

// Positive-rate tolerance used by the bias calibration: half a row, so the
// calibrated rate is the closest one the sample size allows.
double positive_rate_tolerance(std::size_t n_samples);

SyntheticPopulation sample_population(const GeneratorConfig& config, const ProfileSchema& schema, Rand& rng);

// Draws a synthetic default-schema dataset. Throws CalibrationError when the
// label bias cannot be calibrated within 100 bisection steps.
Dataset generate_dataset(const GeneratorConfig& config, Rand& rng);
Dataset generate_dataset(const GeneratorConfig& config);

}  // namespace recourse
