#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "recourse/error.hpp"
#include "recourse/predictors/model_io.hpp"
#include "recourse/util/files.hpp"
#include "support/pipeline.hpp"

using namespace recourse;
using recourse::testing::default_pipeline;
using recourse::testing::naive_forward;

namespace {

Dataset small_data(std::uint64_t seed = 5, std::size_t n = 300) {
  GeneratorConfig config;
  config.n_samples = n;
  config.seed = seed;
  return generate_dataset(config);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("recourse_test_" + name);
}

// Encoder ignores its input; the decoder's bias is the reconstruction.
AutoencoderModel constant_autoencoder(const Vector& reconstruction) {
  const std::size_t width = reconstruction.size();
  AutoencoderModel ae;
  ae.encoder = zeros_like(MlpSpec{{width, 1}, {Activation::linear}});
  ae.decoder = zeros_like(MlpSpec{{1, width}, {Activation::linear}});
  ae.decoder.layers[0].bias = reconstruction;
  return ae;
}

}  // namespace

TEST_SUITE("predictors") {

TEST_CASE("classifier: default training lands in the expected accuracy band") {
  const auto& p = default_pipeline();
  CHECK(p.classifier_report.test_accuracy >= 0.70);
  CHECK(p.classifier_report.test_accuracy <= 0.90);
  CHECK(accuracy(p.classifier, p.test) == p.classifier_report.test_accuracy);
  CHECK(p.classifier.info.seed == 7);
  CHECK(p.classifier.net.spec == default_classifier_spec(33));
}

TEST_CASE("classifier: degenerate single-class training set") {
  Dataset d = small_data();
  std::vector<std::size_t> positives;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.labels[i] == 1) positives.push_back(i);
  }
  const Dataset only = d.subset(positives);
  Rand rng(7);
  TrainConfig config;
  config.epochs = 20;
  const auto [model, report] = train_classifier(only, only, config, rng);
  CHECK(report.train_accuracy == 1.0);
}

TEST_CASE("classifier: same seed gives byte-identical model files") {
  const Dataset d = small_data();
  Rand split_rng(1);
  const auto [train, test] = split(d, 0.8, split_rng);
  TrainConfig config;
  config.epochs = 15;
  Rand a(7), b(7);
  const auto ma = train_classifier(train, test, config, a).first;
  const auto mb = train_classifier(train, test, config, b).first;
  CHECK(classifier_to_json(ma).dump() == classifier_to_json(mb).dump());
  CHECK_THROWS_AS(train_classifier(train, small_data(5, 50), config, a), SpecError);
}

TEST_CASE("predict: zero model, batch consistency, naive oracle, purity") {
  const auto& p = default_pipeline();
  ClassifierModel zero = p.classifier;
  zero.net = zeros_like(zero.net.spec);
  CHECK(predict(zero, p.test.normalized(0)) == 0.5);
  for (double g : predict_input_gradient(zero, p.test.normalized(0))) CHECK(g == 0.0);

  const Vector batch = predict_batch(p.classifier, p.test.rows);
  const Matrix naive = naive_forward(p.classifier.net, p.test.rows);
  for (std::size_t i = 0; i < p.test.size(); ++i) {
    const double single = predict(p.classifier, p.test.normalized(i));
    CHECK(single == batch[i]);
    CHECK(std::abs(single - naive(i, 0)) < 1e-12);
    CHECK(single > 0.0);
    CHECK(single < 1.0);
  }
  CHECK(predict(p.classifier, p.test.normalized(3)) == predict(p.classifier, p.test.normalized(3)));
  CHECK_THROWS_AS(predict(p.classifier, Vector(5, 0.0)), SpecError);
}

TEST_CASE("predict_input_gradient: closed form and finite differences") {
  ClassifierModel one;
  one.net = zeros_like(MlpSpec{{1, 1}, {Activation::sigmoid}});
  one.net.layers[0].weights(0, 0) = 1.7;
  one.net.layers[0].bias[0] = -0.3;
  const double x = 0.4;
  const double s = 1.0 / (1.0 + std::exp(-(1.7 * x - 0.3)));
  CHECK(predict_input_gradient(one, Vector{x})[0] == doctest::Approx(1.7 * s * (1.0 - s)).epsilon(1e-12));

  const auto& p = default_pipeline();
  Vector v = p.test.normalized(1).values;
  const Vector g = predict_input_gradient(p.classifier, v);
  double worst = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double saved = v[j];
    v[j] = saved + 1e-5;
    const double up = predict(p.classifier, v);
    v[j] = saved - 1e-5;
    const double down = predict(p.classifier, v);
    v[j] = saved;
    worst = std::max(worst, recourse::testing::relative_error(g[j], (up - down) / 2e-5));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("autoencoder: architecture, real rows reconstruct better than noise, determinism") {
  const auto& p = default_pipeline();
  const AutoencoderModel& ae = p.autoencoder;
  CHECK(ae.latent_width() == 8);
  CHECK(ae.decoder.spec.output_width() == 33);

  Rand rng(99);
  Matrix noise(p.test.size(), 33);
  for (double& v : noise.values()) v = rng.uniform(-3.0, 3.0);
  const Vector real = reconstruction_errors(ae, p.test.rows);
  const Vector fake = reconstruction_errors(ae, noise);
  double real_mean = 0.0, fake_mean = 0.0;
  for (double v : real) {
    CHECK(v >= 0.0);
    real_mean += v;
  }
  for (double v : fake) fake_mean += v;
  CHECK(real_mean < fake_mean);

  const Dataset d = small_data();
  TrainConfig config = default_autoencoder_config();
  config.epochs = 10;
  Rand a(11), b(11);
  CHECK(autoencoder_to_json(train_autoencoder(d, 0.1, config, a)).dump() ==
        autoencoder_to_json(train_autoencoder(d, 0.1, config, b)).dump());
  CHECK_THROWS_AS(train_autoencoder(d, 0.0, config, a), SpecError);
}

TEST_CASE("property: autoencoder separates real rows from noise on five seeds") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const Dataset d = small_data(seed, 1000);
    Rand split_rng(seed);
    const auto [train, test] = split(d, 0.8, split_rng);
    Rand rng(seed);
    const AutoencoderModel ae = train_autoencoder(train, kDefaultAeNoiseStd, default_autoencoder_config(), rng);
    Matrix noise(test.size(), 33);
    for (double& v : noise.values()) v = rng.uniform(-3.0, 3.0);
    double real = 0.0, fake = 0.0;
    for (double v : reconstruction_errors(ae, test.rows)) real += v;
    for (double v : reconstruction_errors(ae, noise)) fake += v;
    CAPTURE(seed);
    CHECK(real < fake);
  }
}

TEST_CASE("reconstruction_error: exact, constant offset, naive norm") {
  Rand rng(12);
  Vector x(33);
  for (double& v : x) v = rng.normal();
  CHECK(reconstruction_error(constant_autoencoder(x), x) == 0.0);
  Vector shifted = x;
  for (double& v : shifted) v += 0.1;
  CHECK(reconstruction_error(constant_autoencoder(shifted), x) == doctest::Approx(0.33).epsilon(1e-12));

  const auto& p = default_pipeline();
  for (std::size_t i = 0; i < 20; ++i) {
    const Vector row = p.test.normalized(i).values;
    const Matrix rec = naive_forward(p.autoencoder.decoder, naive_forward(p.autoencoder.encoder, Matrix::row_vector(row)));
    double ss = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) ss += (rec(0, j) - row[j]) * (rec(0, j) - row[j]);
    CHECK(std::abs(reconstruction_error(p.autoencoder, row) - ss) < 1e-12);
  }
  CHECK_THROWS_AS(reconstruction_error(p.autoencoder, Vector(4, 0.0)), SpecError);
}

TEST_CASE("prototypes: nearest, identical rows, cap at class size, row-order invariance") {
  const auto& p = default_pipeline();
  const AutoencoderModel& ae = p.autoencoder;
  const PrototypeSet& protos = *ae.prototypes;
  const Vector x = p.test.normalized(0).values;
  const Vector z = encode(ae, x);

  const Vector nearest = prototype_near(protos, z, 1);
  double best = 1e300;
  std::size_t best_row = 0;
  for (std::size_t r = 0; r < protos.encodings.rows(); ++r) {
    double d = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) d += (protos.encodings(r, j) - z[j]) * (protos.encodings(r, j) - z[j]);
    if (d < best) {
      best = d;
      best_row = r;
    }
  }
  for (std::size_t j = 0; j < z.size(); ++j) CHECK(nearest[j] == protos.encodings(best_row, j));

  const Vector all = prototype_near(protos, z, protos.encodings.rows() + 10);
  for (std::size_t j = 0; j < z.size(); ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < protos.encodings.rows(); ++r) mean += protos.encodings(r, j);
    mean /= static_cast<double>(protos.encodings.rows());
    CHECK(all[j] == doctest::Approx(mean).epsilon(1e-12));
  }

  std::vector<std::size_t> reversed(p.train.size());
  for (std::size_t i = 0; i < reversed.size(); ++i) reversed[i] = reversed.size() - 1 - i;
  const Dataset flipped = p.train.subset(reversed, p.train.schema);
  const PrototypeSet protos2 = compute_prototypes(ae, flipped, 1, 5);
  CHECK(prototype_for(protos2, ae, x, 1) == prototype_for(protos, ae, x, 1));
  CHECK_THROWS_AS(prototype_for(protos, ae, x, 0), SpecError);

  Dataset same = p.train.subset(std::vector<std::size_t>{0, 0, 0}, p.train.schema);
  same.labels = {1, 1, 1};
  const PrototypeSet single = compute_prototypes(ae, same, 1, 5);
  const Vector enc = encode(ae, p.train.normalized(0).values);
  CHECK(prototype_for(single, ae, x, 1) == enc);
  CHECK_THROWS_AS(compute_prototypes(ae, same, 0, 5), SpecError);
  CHECK_THROWS_AS(compute_prototypes(ae, same, 1, 0), SpecError);
}

TEST_CASE("model files: round-trip, truncation, version, role") {
  const auto& p = default_pipeline();
  const auto clf_path = temp_path("clf.json");
  const auto ae_path = temp_path("ae.json");
  save_model(p.classifier, clf_path);
  save_model(p.autoencoder, ae_path);
  const ClassifierModel clf = load_classifier(clf_path);
  const AutoencoderModel ae = load_autoencoder(ae_path);
  Rand rng(13);
  for (int i = 0; i < 100; ++i) {
    Vector x(33);
    for (double& v : x) v = rng.normal();
    CHECK(predict(clf, x) == predict(p.classifier, x));
    CHECK(reconstruction_error(ae, x) == reconstruction_error(p.autoencoder, x));
  }
  REQUIRE(ae.prototypes.has_value());
  CHECK(ae.prototypes->encodings == p.autoencoder.prototypes->encodings);
  CHECK(*clf.schema == p.schema());

  const std::string text = read_file(clf_path);
  write_file_atomic(clf_path, text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_classifier(clf_path), FormatError);

  nlohmann::json doc = nlohmann::json::parse(text);
  doc["version"] = 7;
  try {
    classifier_from_json(doc);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.field() == "version");
  }
  CHECK_THROWS_AS(autoencoder_from_json(nlohmann::json::parse(text)), FormatError);
  doc = nlohmann::json::parse(text);
  doc["schema_hash"] = "0000000000000000";
  CHECK_THROWS_AS(classifier_from_json(doc), FormatError);
  std::filesystem::remove(clf_path);
  std::filesystem::remove(ae_path);
}

}  // TEST_SUITE
