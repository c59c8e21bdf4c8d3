#include "recourse/predictors/classifier.hpp"

#include <cmath>

#include "batching.hpp"
#include "recourse/error.hpp"
#include "recourse/numerics/adam.hpp"
#include "recourse/numerics/loss.hpp"

namespace recourse {

void TrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0 || !(learning_rate > 0.0) || weight_decay < 0.0) {
    throw SpecError("train config: epochs, batch_size and learning_rate must be positive");
  }
}

MlpSpec default_classifier_spec(std::size_t width) {
  return MlpSpec{{width, 32, 16, 1}, {Activation::relu, Activation::relu, Activation::sigmoid}};
}

std::pair<ClassifierModel, ClassifierReport> train_classifier(const Dataset& train, const Dataset& test,
                                                              const TrainConfig& config, Rand& rng) {
  config.validate();
  if (train.size() == 0) throw SpecError("train_classifier: empty training set");
  if (*train.schema != *test.schema) throw SpecError("train_classifier: train and test schemas differ");

  ClassifierModel model;
  model.schema = train.schema;
  model.net = init_params(default_classifier_spec(train.width()), rng);
  AdamState adam = make_adam_state(model.net, AdamConfig{.learning_rate = config.learning_rate, .weight_decay = config.weight_decay});

  double epoch_loss = 0.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    detail::for_each_minibatch(train.size(), config.batch_size, rng, [&](std::span<const std::size_t> idx) {
      const Matrix x = detail::gather_rows(train.rows, idx);
      Matrix y(idx.size(), 1);
      for (std::size_t k = 0; k < idx.size(); ++k) y(k, 0) = train.labels[idx[k]];
      const ForwardCache cache = mlp_forward(model.net, x);
      const LossResult loss = bce_loss(cache.output(), y);
      if (!std::isfinite(loss.loss)) {
        throw TrainingError("train_classifier: non-finite loss in epoch " + std::to_string(epoch));
      }
      loss_sum += loss.loss * static_cast<double>(idx.size());
      const Gradients g = mlp_backward(model.net, cache, loss.grad);
      adam_step(model.net, g.params, adam);
    });
    epoch_loss = loss_sum / static_cast<double>(train.size());
  }

  ClassifierReport report{accuracy(model, train), accuracy(model, test), epoch_loss};
  model.info = TrainingInfo{rng.seed(), config.epochs, report.train_accuracy, report.test_accuracy, epoch_loss};
  return {std::move(model), report};
}

double predict(const ClassifierModel& model, std::span<const double> x) {
  return mlp_predict(model.net, Matrix::row_vector(x))(0, 0);
}

Vector predict_batch(const ClassifierModel& model, const Matrix& rows) {
  const Matrix out = mlp_predict(model.net, rows);
  return Vector(out.values().begin(), out.values().end());
}

Vector predict_input_gradient(const ClassifierModel& model, std::span<const double> x) {
  const ForwardCache cache = mlp_forward(model.net, Matrix::row_vector(x));
  const Matrix g = mlp_input_gradient(model.net, cache, Matrix(1, 1, 1.0));
  return Vector(g.values().begin(), g.values().end());
}

double accuracy(const ClassifierModel& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  const Vector p = predict_batch(model, data.rows);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hits += (p[i] >= kDecisionThreshold ? 1 : 0) == data.labels[i];
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace recourse
