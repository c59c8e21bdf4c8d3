#include "recourse/engines/csgp.hpp"

#include <chrono>
#include <cmath>

#include "recourse/error.hpp"
#include "recourse/predictors/prototypes.hpp"

namespace recourse {

void CsgpConfig::validate() const {
  if (pred_weight < 0.0 || l1_weight < 0.0 || l2_weight < 0.0 || proto_weight < 0.0 || ae_weight < 0.0) {
    throw SpecError("csgp: weights must be non-negative");
  }
  if (k == 0 || !(learning_rate > 0.0) || max_iters == 0) {
    throw SpecError("csgp: k >= 1, learning_rate > 0 and max_iters >= 1 required");
  }
  if (!(target_prob > 0.0 && target_prob < 1.0)) throw SpecError("csgp: target_prob must lie in (0, 1)");
}

CfResult csgp_generate(const ClassifierModel& classifier, const AutoencoderModel& ae, const PrototypeSet& prototypes,
                       const RawProfile& x, const ProfileSchema& schema, const CsgpConfig& config) {
  config.validate();
  if (prototypes.target_class != config.target_class) throw SpecError("csgp: prototypes are for another class");
  const auto start = std::chrono::steady_clock::now();
  const NormalizedProfile origin = schema.normalize(x);
  const auto mask = schema.mutable_mask();
  const std::size_t width = schema.size();
  const Vector proto = prototype_near(prototypes, encode(ae, origin.values), config.k);
  const bool use_ae = config.proto_weight > 0.0 || config.ae_weight > 0.0;
  const double class_target = config.target_class == 1 ? config.target_prob : 1.0 - config.target_prob;

  Vector delta(width, 0.0);
  Matrix y(1, width);
  const Matrix seed(1, 1, 1.0);
  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    for (std::size_t j = 0; j < width; ++j) y(0, j) = origin.values[j] + delta[j];

    const ForwardCache c_cache = mlp_forward(classifier.net, y);
    const double miss = c_cache.output()(0, 0) - class_target;
    const Matrix grad_c = mlp_input_gradient(classifier.net, c_cache, seed);

    Vector grad(width, 0.0);
    for (std::size_t j = 0; j < width; ++j) {
      const double l1_sub = delta[j] > 0.0 ? 1.0 : (delta[j] < 0.0 ? -1.0 : 0.0);
      grad[j] = config.pred_weight * 2.0 * miss * grad_c(0, j) + config.l1_weight * l1_sub +
                2.0 * config.l2_weight * delta[j];
    }

    if (use_ae) {
      const ForwardCache enc = mlp_forward(ae.encoder, y);
      const ForwardCache dec = mlp_forward(ae.decoder, enc.output());
      // recon residual r = AE(y) - y; d||r||^2/dy = J_AE^T 2r - 2r
      Matrix dec_seed(1, width);
      for (std::size_t j = 0; j < width; ++j) {
        const double r = dec.output()(0, j) - y(0, j);
        dec_seed(0, j) = config.ae_weight * 2.0 * r;
        grad[j] -= config.ae_weight * 2.0 * r;
      }
      Matrix latent_grad = mlp_input_gradient(ae.decoder, dec, dec_seed);
      for (std::size_t z = 0; z < proto.size(); ++z) {
        latent_grad(0, z) += config.proto_weight * 2.0 * (enc.output()(0, z) - proto[z]);
      }
      const Matrix through_encoder = mlp_input_gradient(ae.encoder, enc, latent_grad);
      for (std::size_t j = 0; j < width; ++j) grad[j] += through_encoder(0, j);
    }

    for (std::size_t j = 0; j < width; ++j) delta[j] = mask[j] == 0.0 ? 0.0 : delta[j] - config.learning_rate * grad[j];
    if (!all_finite(delta)) throw NumericError("csgp: non-finite iterate at iteration " + std::to_string(it));
  }

  Vector candidate(width);
  for (std::size_t j = 0; j < width; ++j) candidate[j] = origin.values[j] + delta[j];
  CfResult out = finalize(x, candidate, schema, classifier, config.enforce_bounds);
  out.iterations = config.max_iters;
  out.method = Method::csgp;
  out.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

}  // namespace recourse
