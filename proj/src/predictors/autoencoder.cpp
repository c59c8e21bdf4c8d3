#include "recourse/predictors/autoencoder.hpp"

#include <cmath>

#include "batching.hpp"
#include "recourse/error.hpp"
#include "recourse/numerics/adam.hpp"
#include "recourse/numerics/loss.hpp"

namespace recourse {

TrainConfig default_autoencoder_config() { return TrainConfig{100, 64, 1e-3, 11, 0.0}; }

AutoencoderModel train_autoencoder(const Dataset& train, double noise_std, const TrainConfig& config, Rand& rng) {
  config.validate();
  if (!(noise_std > 0.0)) throw SpecError("train_autoencoder: noise_std must be positive");
  if (train.size() == 0) throw SpecError("train_autoencoder: empty training set");

  const std::size_t width = train.width();
  AutoencoderModel ae;
  ae.noise_std = noise_std;
  ae.schema = train.schema;
  ae.encoder = init_params(MlpSpec{{width, 16, kDefaultLatentWidth}, {Activation::relu, Activation::linear}}, rng);
  ae.decoder = init_params(MlpSpec{{kDefaultLatentWidth, 16, width}, {Activation::relu, Activation::linear}}, rng);
  AdamState enc_adam = make_adam_state(ae.encoder, AdamConfig{config.learning_rate});
  AdamState dec_adam = make_adam_state(ae.decoder, AdamConfig{config.learning_rate});

  double epoch_loss = 0.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    detail::for_each_minibatch(train.size(), config.batch_size, rng, [&](std::span<const std::size_t> idx) {
      const Matrix clean = detail::gather_rows(train.rows, idx);
      Matrix noisy = clean;
      for (double& v : noisy.values()) v += rng.normal(0.0, noise_std);
      const ForwardCache enc = mlp_forward(ae.encoder, noisy);
      const ForwardCache dec = mlp_forward(ae.decoder, enc.output());
      const LossResult loss = mse_loss(dec.output(), clean);
      if (!std::isfinite(loss.loss)) {
        throw TrainingError("train_autoencoder: non-finite loss in epoch " + std::to_string(epoch));
      }
      loss_sum += loss.loss * static_cast<double>(idx.size());
      const Gradients dg = mlp_backward(ae.decoder, dec, loss.grad);
      const Gradients eg = mlp_backward(ae.encoder, enc, dg.input);
      adam_step(ae.decoder, dg.params, dec_adam);
      adam_step(ae.encoder, eg.params, enc_adam);
    });
    epoch_loss = loss_sum / static_cast<double>(train.size());
  }
  ae.info = TrainingInfo{rng.seed(), config.epochs, 0.0, 0.0, epoch_loss};
  return ae;
}

Matrix encode(const AutoencoderModel& ae, const Matrix& rows) { return mlp_predict(ae.encoder, rows); }

Vector encode(const AutoencoderModel& ae, std::span<const double> x) {
  const Matrix z = mlp_predict(ae.encoder, Matrix::row_vector(x));
  return Vector(z.values().begin(), z.values().end());
}

Matrix reconstruct(const AutoencoderModel& ae, const Matrix& rows) {
  return mlp_predict(ae.decoder, mlp_predict(ae.encoder, rows));
}

double reconstruction_error(const AutoencoderModel& ae, std::span<const double> x) {
  const Matrix r = reconstruct(ae, Matrix::row_vector(x));
  double err = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = r(0, j) - x[j];
    err += d * d;
  }
  return err;
}

Vector reconstruction_errors(const AutoencoderModel& ae, const Matrix& rows) {
  const Matrix r = reconstruct(ae, rows);
  Vector out(rows.rows(), 0.0);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    for (std::size_t j = 0; j < rows.cols(); ++j) {
      const double d = r(i, j) - rows(i, j);
      out[i] += d * d;
    }
  }
  return out;
}

}  // namespace recourse
