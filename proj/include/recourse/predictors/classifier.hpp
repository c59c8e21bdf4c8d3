#pragma once

#include <memory>
#include <span>
#include <utility>

#include "recourse/numerics/mlp.hpp"
#include "recourse/predictors/training.hpp"
#include "recourse/profiles/dataset.hpp"

namespace recourse {

inline constexpr double kDecisionThreshold = 0.5;

// The fixed target classifier: sigmoid output, P(approve | profile).
struct ClassifierModel {
  MlpParams net;
  std::shared_ptr<const ProfileSchema> schema;
  TrainingInfo info;
};

struct ClassifierReport {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double final_loss = 0.0;
};

// width -> 32 relu -> 16 relu -> 1 sigmoid
MlpSpec default_classifier_spec(std::size_t width);

// Minibatch BCE training with Adam. Throws TrainingError on a non-finite loss.
std::pair<ClassifierModel, ClassifierReport> train_classifier(const Dataset& train, const Dataset& test,
                                                              const TrainConfig& config, Rand& rng);

double predict(const ClassifierModel& model, std::span<const double> x);
inline double predict(const ClassifierModel& model, const NormalizedProfile& x) { return predict(model, x.values); }
Vector predict_batch(const ClassifierModel& model, const Matrix& rows);

// d predict / d x
Vector predict_input_gradient(const ClassifierModel& model, std::span<const double> x);
inline Vector predict_input_gradient(const ClassifierModel& model, const NormalizedProfile& x) {
  return predict_input_gradient(model, x.values);
}

// Fraction of rows where [predict >= 0.5] equals the label.
double accuracy(const ClassifierModel& model, const Dataset& data);

}  // namespace recourse
