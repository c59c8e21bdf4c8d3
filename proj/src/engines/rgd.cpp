#include "recourse/engines/rgd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "recourse/error.hpp"

namespace recourse {

void RgdConfig::validate() const {
  if (!(target_prob > 0.0 && target_prob < 1.0)) throw SpecError("rgd: target_prob must lie in (0, 1)");
  if (l1_weight < 0.0 || !(learning_rate > 0.0) || max_iters == 0) {
    throw SpecError("rgd: l1_weight >= 0, learning_rate > 0 and max_iters >= 1 required");
  }
}

namespace {

struct Point {
  Vector x;
  ForwardCache cache;
  double prob = 0.0;
  double objective = 0.0;
};

Point evaluate(const ClassifierModel& c, Vector x, std::span<const double> origin, const RgdConfig& cfg) {
  Point p;
  p.cache = mlp_forward(c.net, Matrix::row_vector(x));
  p.prob = p.cache.output()(0, 0);
  double l1 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) l1 += std::abs(x[j] - origin[j]);
  const double miss = p.prob - cfg.target_prob;
  p.objective = miss * miss + cfg.l1_weight * l1;
  p.x = std::move(x);
  return p;
}

}  // namespace

CfResult rgd_generate(const ClassifierModel& classifier, const RawProfile& x, const ProfileSchema& schema,
                      const RgdConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const NormalizedProfile origin = schema.normalize(x);
  const auto mask = schema.mutable_mask();
  const std::size_t width = schema.size();

  Point current = evaluate(classifier, origin.values, origin.values, config);
  Vector trace{(current.prob - config.target_prob) * (current.prob - config.target_prob)};
  double step = config.learning_rate;
  std::size_t iterations = 0;
  const Matrix seed(1, 1, 1.0);

  while (current.prob < config.target_prob && iterations < config.max_iters) {
    ++iterations;
    const Matrix grad_c = mlp_input_gradient(classifier.net, current.cache, seed);
    const double miss = current.prob - config.target_prob;
    Vector next(width);
    for (std::size_t j = 0; j < width; ++j) {
      if (mask[j] == 0.0) {
        next[j] = origin.values[j];
        continue;
      }
      const double offset = current.x[j] - origin.values[j];
      const double l1_sub = offset > 0.0 ? 1.0 : (offset < 0.0 ? -1.0 : 0.0);
      const double g = 2.0 * miss * grad_c(0, j) + config.l1_weight * l1_sub;
      next[j] = current.x[j] - step * g;
    }
    if (!all_finite(next)) {
      throw NumericError("rgd: non-finite iterate at iteration " + std::to_string(iterations));
    }
    Point candidate = evaluate(classifier, std::move(next), origin.values, config);
    const double miss_next = candidate.prob - config.target_prob;
    if (miss_next * miss_next <= miss * miss || candidate.objective <= current.objective) {
      current = std::move(candidate);
      step = std::min(config.learning_rate, 2.0 * step);
      trace.push_back(miss_next * miss_next);
    } else {
      step *= 0.5;
    }
  }

  CfResult out = finalize(x, current.x, schema, classifier, config.enforce_bounds);
  out.iterations = iterations;
  out.method = Method::rgd;
  out.loss_trace = std::move(trace);
  out.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

}  // namespace recourse
