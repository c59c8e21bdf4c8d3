#include "recourse/profiles/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "recourse/error.hpp"

namespace recourse {

namespace {

constexpr std::size_t kFactors = 4;  // seniority, engagement, education, market

// How one feature is drawn. Every feature loads on a few shared latent
// factors (in units of its sd), which gives the data low-dimensional
// structure. `weight` is the feature's coefficient in the hidden score.
// Relevance dominates the score and the immutable features contribute
// little, so most rejected profiles have a mutable way out.
struct Recipe {
  enum class Draw { salary_grid, truncated_normal, bernoulli } draw;
  double mean;  // bernoulli: threshold on the standard-normal latent
  double sd;
  std::array<double, kFactors> loading;
  double weight;
};

// Same order as default_schema().
const std::array<Recipe, 33>& recipes() {
  using D = Recipe::Draw;
  static const std::array<Recipe, 33> table = {{
      // mutable
      {D::salary_grid, 0.0, 0.0, {0.89, 0.0, 0.0, 0.44}, 0.35},
      {D::truncated_normal, 6.0, 3.0, {0.0, 0.90, 0.0, 0.0}, 0.45},
      {D::truncated_normal, 0.0, 1.0, {0.4, 0.2, 0.0, 0.0}, 8.0},
      {D::truncated_normal, 70.0, 30.0, {0.30, 0.90, 0.0, 0.0}, 0.5},
      {D::truncated_normal, 7.0, 5.0, {0.99, 0.0, 0.0, 0.0}, 0.55},
      {D::truncated_normal, 0.9, 0.4, {0.0, 0.60, 0.0, 0.60}, 0.8},
      // binary flags
      {D::bernoulli, 1.4, 0.0, {0.0, 0.0, 0.99, 0.0}, 0.175},
      {D::bernoulli, 0.52, 0.0, {0.0, 0.0, 0.99, 0.0}, 0.125},
      {D::bernoulli, -0.67, 0.0, {0.0, 0.0, 0.90, 0.0}, 0.075},
      {D::bernoulli, 0.12, 0.0, {0.0, 0.30, 0.75, 0.0}, 0.15},
      {D::bernoulli, 1.04, 0.0, {0.0, 0.45, -0.75, 0.0}, -0.05},
      {D::bernoulli, -0.84, 0.0, {0.0, 0.0, 0.0, 0.45}, 0.15},
      {D::bernoulli, -0.13, 0.0, {0.0, 0.45, 0.0, 0.0}, 0.05},
      // counts
      {D::truncated_normal, 12.0, 6.0, {0.0, 0.99, 0.0, 0.0}, 0.1},
      {D::truncated_normal, 4.0, 2.5, {0.99, 0.0, 0.0, 0.0}, 0.075},
      {D::truncated_normal, 5.0, 3.5, {0.0, 0.90, 0.30, 0.0}, 0.075},
      {D::truncated_normal, 2.0, 2.0, {0.0, 0.45, 0.60, 0.0}, 0.05},
      {D::truncated_normal, 2.0, 1.2, {0.0, 0.0, 0.0, 0.45}, 0.025},
      {D::truncated_normal, 15.0, 8.0, {0.0, 0.75, 0.0, 0.60}, 0.075},
      {D::truncated_normal, 6.0, 4.0, {0.0, 0.44, 0.0, 0.89}, 0.1},
      {D::truncated_normal, 8.0, 5.0, {-0.60, 0.45, 0.0, 0.0}, -0.05},
      {D::truncated_normal, 2.0, 1.5, {0.0, 0.90, 0.0, 0.0}, 0.05},
      {D::truncated_normal, 10.0, 6.0, {0.60, 0.75, 0.0, 0.0}, 0.05},
      // marketplace indices
      {D::truncated_normal, 0.0, 1.0, {0.0, 0.0, 0.0, 0.99}, 0.125},
      {D::truncated_normal, 0.0, 1.0, {0.0, 0.0, 0.0, 0.99}, 0.1},
      {D::truncated_normal, 0.0, 1.0, {0.0, 0.0, 0.0, 0.90}, 0.075},
      {D::truncated_normal, 0.0, 1.0, {0.0, 0.0, 0.0, 0.45}, -0.025},
      {D::truncated_normal, 0.0, 1.0, {0.0, 0.0, 0.0, -0.75}, -0.1},
      {D::truncated_normal, 0.0, 1.0, {0.90, 0.0, 0.0, 0.0}, 0.05},
      {D::truncated_normal, 0.0, 1.0, {0.0, 0.0, 0.0, -0.60}, -0.075},
      {D::truncated_normal, 0.0, 1.0, {0.0, 0.0, 0.0, 0.0}, 0.0},
      {D::truncated_normal, 0.0, 1.0, {0.45, 0.60, 0.0, 0.0}, 0.1},
      {D::truncated_normal, 0.0, 1.0, {0.0, 0.44, 0.0, 0.89}, 0.125},
  }};
  return table;
}

double truncated_normal(Rand& rng, double mean, double sd, double lo, double hi) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double v = rng.normal(mean, sd);
    if (v >= lo && v <= hi) return v;
  }
  return std::clamp(mean, lo, hi);
}

double draw_feature(Rand& rng, const Recipe& recipe, const FeatureSpec& f,
                    const std::array<double, kFactors>& factors) {
  double common = 0.0;
  double communality = 0.0;
  for (std::size_t k = 0; k < kFactors; ++k) {
    common += recipe.loading[k] * factors[k];
    communality += recipe.loading[k] * recipe.loading[k];
  }
  const double unique_sd = std::sqrt(1.0 - communality);
  if (recipe.draw == Recipe::Draw::salary_grid) {
    const auto cells = static_cast<std::size_t>(std::llround((f.upper_bound - f.lower_bound) / f.step));
    const double latent = common + rng.normal(0.0, unique_sd);
    const double u = 0.5 * std::erfc(-latent / std::sqrt(2.0));
    const auto cell = std::min(cells, static_cast<std::size_t>(u * static_cast<double>(cells + 1)));
    return f.lower_bound + f.step * static_cast<double>(cell);
  }
  if (recipe.draw == Recipe::Draw::bernoulli) {
    return common + rng.normal(0.0, unique_sd) > recipe.mean ? 1.0 : 0.0;
  }
  const double v =
      truncated_normal(rng, recipe.mean + recipe.sd * common, recipe.sd * unique_sd, f.lower_bound, f.upper_bound);
  return f.kind == FeatureKind::integer ? std::round(v) : v;
}

Vector column_stat_scores(const Matrix& raw) {
  const auto& table = recipes();
  const double n = static_cast<double>(raw.rows());
  Vector score(raw.rows(), 0.0);
  for (std::size_t j = 0; j < raw.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t r = 0; r < raw.rows(); ++r) sum += raw(r, j);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < raw.rows(); ++r) ss += (raw(r, j) - mean) * (raw(r, j) - mean);
    const double sd = std::sqrt(ss / n);
    if (sd <= 1e-12) continue;
    for (std::size_t r = 0; r < raw.rows(); ++r) score[r] += table[j].weight * (raw(r, j) - mean) / sd;
  }
  double mean = 0.0;
  for (double s : score) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : score) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / n);
  for (double& s : score) s = sd > 1e-12 ? (s - mean) / sd : 0.0;
  return score;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_samples < 2) throw SpecError("generator: need at least two samples");
  if (!(target_positive_rate > 0.0 && target_positive_rate < 1.0)) {
    throw SpecError("generator: target_positive_rate must lie in (0, 1)");
  }
  if (!(label_noise_std > 0.0)) throw SpecError("generator: label_noise_std must be positive");
}

double positive_rate_tolerance(std::size_t n_samples) {
  return 0.5 / static_cast<double>(n_samples);
}

double SyntheticPopulation::bayes_accuracy() const {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int rule = hidden_score[i] + bias > 0.0 ? 1 : 0;
    hits += rule == labels[i] ? 1 : 0;
  }
  return labels.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(labels.size());
}

SyntheticPopulation sample_population(const GeneratorConfig& config, const ProfileSchema& schema, Rand& rng) {
  config.validate();
  const ProfileSchema reference = default_schema();
  if (schema.size() != reference.size()) throw SchemaError("generator: schema must have the default layout");
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema.feature(j).name != reference.feature(j).name) {
      throw SchemaError("generator: unexpected feature '" + schema.feature(j).name + "'", schema.feature(j).name);
    }
  }

  const auto& table = recipes();
  SyntheticPopulation pop;
  pop.raw = Matrix(config.n_samples, schema.size());
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    std::array<double, kFactors> factors{};
    for (double& z : factors) z = rng.normal();
    for (std::size_t j = 0; j < schema.size(); ++j) {
      pop.raw(i, j) = draw_feature(rng, table[j], schema.feature(j), factors);
    }
  }
  pop.hidden_score = column_stat_scores(pop.raw);

  // Label = [sigmoid(score + bias + noise) >= 0.5]; the noise is drawn once
  // so the positive rate is a monotone step function of the bias.
  Vector noise(config.n_samples);
  for (double& e : noise) e = rng.normal(0.0, config.label_noise_std);
  auto rate_at = [&](double bias) {
    std::size_t positives = 0;
    for (std::size_t i = 0; i < config.n_samples; ++i) positives += pop.hidden_score[i] + bias + noise[i] > 0.0;
    return static_cast<double>(positives) / static_cast<double>(config.n_samples);
  };

  pop.rate_tolerance = positive_rate_tolerance(config.n_samples);
  double lo = -20.0;
  double hi = 20.0;
  bool calibrated = false;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double rate = rate_at(mid);
    // Slack for round-off: with n = 50, 0.42 and 0.44 are exactly half a row from 0.43.
    if (std::abs(rate - config.target_positive_rate) <= pop.rate_tolerance * (1.0 + 1e-9)) {
      pop.bias = mid;
      calibrated = true;
      break;
    }
    (rate < config.target_positive_rate ? lo : hi) = mid;
  }
  if (!calibrated) throw CalibrationError("generator: label bias bisection did not converge in 100 iterations");

  pop.labels.resize(config.n_samples);
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    pop.labels[i] = pop.hidden_score[i] + pop.bias + noise[i] > 0.0 ? 1 : 0;
  }
  return pop;
}

Dataset generate_dataset(const GeneratorConfig& config, Rand& rng) {
  const ProfileSchema schema = default_schema();
  SyntheticPopulation pop = sample_population(config, schema, rng);
  return make_dataset(schema, std::move(pop.raw), std::move(pop.labels));
}

Dataset generate_dataset(const GeneratorConfig& config) {
  Rand rng(config.seed);
  return generate_dataset(config, rng);
}

}  // namespace recourse
