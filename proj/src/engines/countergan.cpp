#include "recourse/engines/countergan.hpp"

#include <chrono>
#include <cmath>

#include "recourse/error.hpp"
#include "recourse/numerics/adam.hpp"
#include "recourse/numerics/loss.hpp"
#include "recourse/numerics/mlp_io.hpp"
#include "recourse/predictors/model_io.hpp"
#include "recourse/util/files.hpp"

namespace recourse {

using nlohmann::json;

void CounterganConfig::validate(std::size_t width) const {
  if (reg_weight < 0.0) throw SpecError("countergan: reg_weight must be non-negative");
  if (steps == 0 || batch_size == 0) throw SpecError("countergan: steps and batch_size must be positive");
  if (target_class != 0 && target_class != 1) throw SpecError("countergan: target_class must be 0 or 1");
  generator_spec.validate();
  discriminator_spec.validate();
  if (generator_spec.input_width() != width || generator_spec.output_width() != width) {
    throw SpecError("countergan: generator must map width -> width");
  }
  if (discriminator_spec.input_width() != width || discriminator_spec.output_width() != 1 ||
      discriminator_spec.activations.back() != Activation::sigmoid) {
    throw SpecError("countergan: discriminator must map width -> 1 sigmoid");
  }
}

CounterganConfig default_countergan_config(std::size_t width) {
  CounterganConfig c;
  c.generator_spec = MlpSpec{{width, 64, 64, width}, {Activation::relu, Activation::relu, Activation::linear}};
  c.discriminator_spec = MlpSpec{{width, 32, 16, 1}, {Activation::relu, Activation::relu, Activation::sigmoid}};
  return c;
}

namespace {

void apply_mask_rows(Matrix& m, std::span<const double> mask) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] *= mask[j];
  }
}

Matrix add(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  auto o = out.values();
  const auto bv = b.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] += bv[k];
  return out;
}

}  // namespace

GanModels countergan_train(const ClassifierModel& classifier, const Dataset& train, const ProfileSchema& schema,
                           const CounterganConfig& config, Rand& rng) {
  config.validate(schema.size());
  if (train.size() == 0) throw SpecError("countergan_train: empty training set");
  if (train.width() != schema.size()) throw SpecError("countergan_train: dataset width mismatch");

  GanModels gan;
  gan.config = config;
  gan.schema = std::make_shared<const ProfileSchema>(schema);
  gan.generator = init_params(config.generator_spec, rng);
  gan.discriminator = init_params(config.discriminator_spec, rng);
  AdamState g_adam = make_adam_state(gan.generator, AdamConfig{config.generator_lr, config.beta1});
  AdamState d_adam = make_adam_state(gan.discriminator, AdamConfig{config.discriminator_lr, config.beta1});
  gan.losses.d_loss.reserve(config.steps);
  gan.losses.g_loss.reserve(config.steps);

  const auto mask = schema.mutable_mask();
  const std::size_t b = std::min(config.batch_size, train.size());
  const Matrix ones(b, 1, 1.0);
  const Matrix zeros(b, 1, 0.0);
  const Matrix& class_target = config.target_class == 1 ? ones : zeros;

  for (std::size_t step = 0; step < config.steps; ++step) {
    Matrix x(b, schema.size());
    for (std::size_t k = 0; k < b; ++k) {
      const std::size_t i = rng.below(train.size());
      std::copy_n(train.rows.row(i).begin(), schema.size(), x.row(k).begin());
    }

    // discriminator update
    const ForwardCache g_cache = mlp_forward(gan.generator, x);
    Matrix residual = g_cache.output();
    apply_mask_rows(residual, mask);
    const Matrix fake = add(x, residual);

    const ForwardCache d_real = mlp_forward(gan.discriminator, x);
    const ForwardCache d_fake = mlp_forward(gan.discriminator, fake);
    const LossResult real_loss = bce_loss(d_real.output(), ones);
    const LossResult fake_loss = bce_loss(d_fake.output(), zeros);
    const double d_loss = real_loss.loss + fake_loss.loss;
    if (!std::isfinite(d_loss)) throw TrainingError("countergan: non-finite discriminator loss at step " + std::to_string(step));
    Gradients d_grads = mlp_backward(gan.discriminator, d_real, real_loss.grad);
    const Gradients d_fake_grads = mlp_backward(gan.discriminator, d_fake, fake_loss.grad);
    for (std::size_t l = 0; l < d_grads.params.layers.size(); ++l) {
      auto w = d_grads.params.layers[l].weights.values();
      const auto wf = d_fake_grads.params.layers[l].weights.values();
      for (std::size_t k = 0; k < w.size(); ++k) w[k] += wf[k];
      auto& bias = d_grads.params.layers[l].bias;
      for (std::size_t k = 0; k < bias.size(); ++k) bias[k] += d_fake_grads.params.layers[l].bias[k];
    }
    adam_step(gan.discriminator, d_grads.params, d_adam);

    // generator update against the refreshed discriminator
    const ForwardCache d_gen = mlp_forward(gan.discriminator, fake);
    const ForwardCache c_gen = mlp_forward(classifier.net, fake);
    const LossResult adv_loss = bce_loss(d_gen.output(), ones);
    const LossResult cls_loss = bce_loss(c_gen.output(), class_target);
    double reg = 0.0;
    for (double v : g_cache.output().values()) reg += v * v;
    reg /= static_cast<double>(b);
    const double g_loss = adv_loss.loss + cls_loss.loss + config.reg_weight * reg;
    if (!std::isfinite(g_loss)) throw TrainingError("countergan: non-finite generator loss at step " + std::to_string(step));

    const Matrix from_d = mlp_input_gradient(gan.discriminator, d_gen, adv_loss.grad);
    const Matrix from_c = mlp_input_gradient(classifier.net, c_gen, cls_loss.grad);
    Matrix g_out_grad(b, schema.size());
    for (std::size_t k = 0; k < b; ++k) {
      for (std::size_t j = 0; j < schema.size(); ++j) {
        g_out_grad(k, j) = mask[j] * (from_d(k, j) + from_c(k, j)) +
                           config.reg_weight * 2.0 * g_cache.output()(k, j) / static_cast<double>(b);
      }
    }
    const Gradients g_grads = mlp_backward(gan.generator, g_cache, g_out_grad);
    adam_step(gan.generator, g_grads.params, g_adam);

    gan.losses.d_loss.push_back(d_loss);
    gan.losses.g_loss.push_back(g_loss);
  }
  return gan;
}

Matrix masked_residuals(const GanModels& gan, const Matrix& rows) {
  Matrix residual = mlp_predict(gan.generator, rows);
  apply_mask_rows(residual, gan.schema->mutable_mask());
  return residual;
}

CfResult countergan_generate(const GanModels& gan, const ClassifierModel& classifier, const RawProfile& x,
                             const ProfileSchema& schema, bool enforce_bounds) {
  const auto start = std::chrono::steady_clock::now();
  if (x.values.size() != schema.size() || gan.generator.spec.input_width() != schema.size()) {
    throw SpecError("countergan_generate: width mismatch");
  }
  const NormalizedProfile norm = schema.normalize(x);
  const Matrix residual = masked_residuals(gan, Matrix::row_vector(norm.values));
  Vector candidate(norm.values);
  for (std::size_t j = 0; j < candidate.size(); ++j) candidate[j] += residual(0, j);
  CfResult out = finalize(x, candidate, schema, classifier, enforce_bounds);
  out.iterations = 1;
  out.method = Method::countergan;
  out.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

std::vector<CfResult> countergan_generate_batch(const GanModels& gan, const ClassifierModel& classifier,
                                                const Matrix& raw_rows, const ProfileSchema& schema,
                                                bool enforce_bounds) {
  if (raw_rows.cols() != schema.size()) throw SpecError("countergan_generate_batch: width mismatch");
  const auto start = std::chrono::steady_clock::now();
  const Matrix norm = schema.normalize_rows(raw_rows);
  const Matrix residual = masked_residuals(gan, norm);
  std::vector<CfResult> out(raw_rows.rows());
  const auto rows = static_cast<long long>(raw_rows.rows());
  // rows are independent; finalize only reads shared state
#pragma omp parallel for schedule(static) if (rows >= 256)
  for (long long r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    const auto raw_row = raw_rows.row(i);
    Vector candidate(norm.row(i).begin(), norm.row(i).end());
    for (std::size_t j = 0; j < candidate.size(); ++j) candidate[j] += residual(i, j);
    out[i] = finalize(RawProfile{Vector(raw_row.begin(), raw_row.end())}, candidate, schema, classifier, enforce_bounds);
    out[i].iterations = 1;
    out[i].method = Method::countergan;
  }
  const auto per_row = (std::chrono::steady_clock::now() - start) / std::max<std::size_t>(1, out.size());
  for (auto& r : out) r.elapsed = per_row;
  return out;
}

json gan_to_json(const GanModels& gan) {
  const auto& c = gan.config;
  json config{{"reg_weight", c.reg_weight},       {"target_class", c.target_class},
              {"generator_lr", c.generator_lr},   {"discriminator_lr", c.discriminator_lr},
              {"beta1", c.beta1},                 {"batch_size", c.batch_size},
              {"steps", c.steps},                 {"seed", c.seed}};
  json metrics{{"final_d_loss", gan.losses.d_loss.empty() ? 0.0 : gan.losses.d_loss.back()},
               {"final_g_loss", gan.losses.g_loss.empty() ? 0.0 : gan.losses.g_loss.back()}};
  json doc = model_envelope("countergan", *gan.schema, c.seed, std::move(metrics));
  doc["config"] = std::move(config);
  doc["networks"] = {{"generator", {{"role", "generator"}, {"network", mlp_to_json(gan.generator)}}},
                     {"discriminator", {{"role", "discriminator"}, {"network", mlp_to_json(gan.discriminator)}}}};
  return doc;
}

GanModels gan_from_json(const json& doc) {
  GanModels gan;
  gan.schema = std::make_shared<const ProfileSchema>(read_envelope(doc, "countergan"));
  try {
    const json& c = doc.at("config");
    CounterganConfig config;
    config.reg_weight = c.at("reg_weight").get<double>();
    config.target_class = c.at("target_class").get<int>();
    config.generator_lr = c.at("generator_lr").get<double>();
    config.discriminator_lr = c.at("discriminator_lr").get<double>();
    config.beta1 = c.at("beta1").get<double>();
    config.batch_size = c.at("batch_size").get<std::size_t>();
    config.steps = c.at("steps").get<std::size_t>();
    config.seed = c.at("seed").get<std::uint64_t>();
    gan.config = config;
  } catch (const json::exception& e) {
    throw FormatError(std::string("countergan: bad config: ") + e.what(), "config");
  }
  if (!doc.contains("networks")) throw FormatError("countergan: missing networks", "networks");
  const json& nets = doc.at("networks");
  for (const char* role : {"generator", "discriminator"}) {
    if (!nets.contains(role) || nets.at(role).value("role", "") != role || !nets.at(role).contains("network")) {
      throw FormatError(std::string("countergan: missing ") + role, std::string("networks.") + role);
    }
  }
  gan.generator = mlp_from_json(nets.at("generator").at("network"));
  gan.discriminator = mlp_from_json(nets.at("discriminator").at("network"));
  gan.config.generator_spec = gan.generator.spec;
  gan.config.discriminator_spec = gan.discriminator.spec;
  gan.config.validate(gan.schema->size());
  return gan;
}

void save_gan(const GanModels& gan, const std::filesystem::path& path) {
  write_file_atomic(path, gan_to_json(gan).dump(1));
}

GanModels load_gan(const std::filesystem::path& path) { return gan_from_json(parse_model_text(read_file(path))); }

std::string loss_trace_csv(const GanModels& gan) {
  std::string out = "step,d_loss,g_loss\n";
  for (std::size_t s = 0; s < gan.losses.d_loss.size(); ++s) {
    out += std::to_string(s) + ',' + format_double(gan.losses.d_loss[s]) + ',' + format_double(gan.losses.g_loss[s]) + '\n';
  }
  return out;
}

}  // namespace recourse
