#include "recourse/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "recourse/benchmark/report.hpp"
#include "recourse/engines/countergan.hpp"
#include "recourse/error.hpp"
#include "recourse/predictors/model_io.hpp"
#include "recourse/predictors/prototypes.hpp"
#include "recourse/profiles/csv.hpp"
#include "recourse/profiles/generator.hpp"
#include "recourse/service/feedback_service.hpp"
#include "recourse/util/files.hpp"

namespace recourse {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// A flag value the user got wrong; reported with exit code 1.
class UserError : public Error {
 public:
  using Error::Error;
};

void require_path(const std::string& flag, const fs::path& path, bool directory = false) {
  if (path.empty()) throw UserError(flag + " is required");
  if (!fs::exists(path)) throw UserError(flag + ": no such " + (directory ? "directory" : "file") + " '" + path.string() + "'");
}

void require_out(const fs::path& path) {
  if (path.empty()) throw UserError("--out is required");
}

struct SplitFlags {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;

  void add(CLI::App* cmd) {
    cmd->add_option("--train-fraction", train_fraction, "Share of rows in the training split")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--split-seed", seed, "Seed of the train/test split")->capture_default_str();
  }
  json to_json() const { return {{"train_fraction", train_fraction}, {"split_seed", seed}}; }
};

std::pair<Dataset, Dataset> load_split(const fs::path& data, const SplitFlags& flags) {
  require_path("--data", data);
  const Dataset all = load_csv(data);
  Rand rng(flags.seed);
  return split(all, flags.train_fraction, rng);
}

// Every artifact gets <artifact>.manifest.json describing how to rebuild it.
void write_manifest(const fs::path& artifact, const std::string& command, const json& args, const json& metrics) {
  json argv = json::array({command});
  for (const auto& [flag, value] : args.items()) {
    argv.push_back("--" + flag);
    argv.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  json manifest{{"command", command},
                {"args", args},
                {"argv", std::move(argv)},
                {"artifact", artifact.filename().string()},
                {"artifact_fnv1a", fnv1a_hex(read_file(artifact))},
                {"metrics", metrics}};
  fs::path path = artifact;
  path += ".manifest.json";
  write_file_atomic(path, manifest.dump(2) + "\n");
}

ModelBundle load_bundle(const fs::path& dir) {
  require_path("--models-dir", dir, true);
  return load_snapshot(dir).models;
}

struct GenData {
  std::size_t n = 3029;
  std::uint64_t seed = 42;
  double positive_rate = 0.43;
  double noise = 0.5;
  fs::path out;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("gen-data", "Draw a synthetic profile dataset (CSV)");
    cmd->add_option("--n", n, "Number of profiles")->capture_default_str();
    cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
    cmd->add_option("--positive-rate", positive_rate, "Target share of approved profiles")->capture_default_str();
    cmd->add_option("--noise", noise, "Label noise sd on the hidden score")->capture_default_str();
    cmd->add_option("--out", out, "Output CSV path");
  }

  int run(std::ostream& out_stream) const {
    require_out(out);
    GeneratorConfig config{n, positive_rate, seed, noise};
    const Dataset data = generate_dataset(config);
    save_csv(data, out);
    const json args{{"n", n}, {"seed", seed}, {"positive-rate", positive_rate}, {"noise", noise},
                    {"out", out.string()}};
    write_manifest(out, "gen-data", args, {{"rows", data.size()}, {"positive_rate", data.positive_rate()}});
    out_stream << "wrote " << data.size() << " rows to " << out.string() << " (positive rate "
               << data.positive_rate() << ")\n";
    return kExitOk;
  }
};

struct TrainClassifier {
  fs::path data;
  fs::path out;
  TrainConfig config;
  SplitFlags split_flags;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("train-classifier", "Train the target classifier");
    cmd->add_option("--data", data, "Dataset CSV from gen-data");
    cmd->add_option("--seed", config.seed, "Training seed")->capture_default_str();
    cmd->add_option("--epochs", config.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--batch-size", config.batch_size, "Minibatch size")->capture_default_str();
    cmd->add_option("--lr", config.learning_rate, "Adam learning rate")->capture_default_str();
    cmd->add_option("--weight-decay", config.weight_decay, "Decoupled weight decay")->capture_default_str();
    split_flags.add(cmd);
    cmd->add_option("--out", out, "Output model path");
  }

  int run(std::ostream& os) const {
    require_out(out);
    const auto [train, test] = load_split(data, split_flags);
    Rand rng(config.seed);
    const auto [model, report] = train_classifier(train, test, config, rng);
    save_model(model, out);
    json args{{"data", data.string()},          {"seed", config.seed},
              {"epochs", config.epochs},        {"batch-size", config.batch_size},
              {"lr", config.learning_rate},     {"weight-decay", config.weight_decay},
              {"train-fraction", split_flags.train_fraction}, {"split-seed", split_flags.seed},
              {"out", out.string()}};
    write_manifest(out, "train-classifier", args,
                   {{"train_accuracy", report.train_accuracy},
                    {"test_accuracy", report.test_accuracy},
                    {"final_loss", report.final_loss}});
    os << "classifier: train accuracy " << report.train_accuracy << ", test accuracy " << report.test_accuracy
       << "\n";
    return kExitOk;
  }
};

struct TrainAutoencoder {
  fs::path data;
  fs::path out;
  TrainConfig config = default_autoencoder_config();
  double noise = kDefaultAeNoiseStd;
  std::size_t prototype_k = kDefaultPrototypeK;
  SplitFlags split_flags;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("train-autoencoder", "Train the denoising autoencoder and CSGP prototypes");
    cmd->add_option("--data", data, "Dataset CSV from gen-data");
    cmd->add_option("--seed", config.seed, "Training seed")->capture_default_str();
    cmd->add_option("--epochs", config.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--batch-size", config.batch_size, "Minibatch size")->capture_default_str();
    cmd->add_option("--lr", config.learning_rate, "Adam learning rate")->capture_default_str();
    cmd->add_option("--noise", noise, "Input corruption sd")->capture_default_str();
    cmd->add_option("--prototype-k", prototype_k, "Neighbours averaged per prototype")->capture_default_str();
    split_flags.add(cmd);
    cmd->add_option("--out", out, "Output model path");
  }

  int run(std::ostream& os) const {
    require_out(out);
    const auto [train, test] = load_split(data, split_flags);
    Rand rng(config.seed);
    AutoencoderModel ae = train_autoencoder(train, noise, config, rng);
    ae.prototypes = compute_prototypes(ae, train, 1, prototype_k);
    save_model(ae, out);
    const Vector errors = reconstruction_errors(ae, test.rows);
    double mean_error = 0.0;
    for (double e : errors) mean_error += e;
    mean_error /= static_cast<double>(errors.size());
    json args{{"data", data.string()},      {"seed", config.seed},     {"epochs", config.epochs},
              {"batch-size", config.batch_size}, {"lr", config.learning_rate}, {"noise", noise},
              {"prototype-k", prototype_k}, {"train-fraction", split_flags.train_fraction},
              {"split-seed", split_flags.seed}, {"out", out.string()}};
    write_manifest(out, "train-autoencoder", args,
                   {{"final_loss", ae.info.final_loss}, {"test_reconstruction_error", mean_error}});
    os << "autoencoder: final loss " << ae.info.final_loss << ", test reconstruction error " << mean_error << "\n";
    return kExitOk;
  }
};

struct TrainCountergan {
  fs::path classifier;
  fs::path data;
  fs::path out;
  double lambda = 1.0;
  std::size_t steps = 2000;
  std::size_t batch_size = 64;
  std::uint64_t seed = 13;
  SplitFlags split_flags;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("train-countergan", "Train the residual generator against a classifier");
    cmd->add_option("--classifier", classifier, "Classifier model from train-classifier");
    cmd->add_option("--data", data, "Dataset CSV from gen-data");
    cmd->add_option("--lambda", lambda, "Weight of the residual norm penalty")->capture_default_str();
    cmd->add_option("--steps", steps, "Alternating update steps")->capture_default_str();
    cmd->add_option("--batch-size", batch_size, "Minibatch size")->capture_default_str();
    cmd->add_option("--seed", seed, "Training seed")->capture_default_str();
    split_flags.add(cmd);
    cmd->add_option("--out", out, "Output model path");
  }

  int run(std::ostream& os) const {
    require_path("--classifier", classifier);
    require_out(out);
    const ClassifierModel clf = load_classifier(classifier);
    const auto [train, test] = load_split(data, split_flags);
    if (clf.schema->hash() != train.schema->hash()) {
      throw UserError("--classifier: model was trained on a different dataset or split");
    }
    CounterganConfig config = default_countergan_config(train.width());
    config.reg_weight = lambda;
    config.steps = steps;
    config.batch_size = batch_size;
    config.seed = seed;
    Rand rng(seed);
    const GanModels gan = countergan_train(clf, train, *train.schema, config, rng);
    save_gan(gan, out);
    const Matrix residuals = masked_residuals(gan, test.rows);
    double mean_norm = 0.0;
    for (std::size_t r = 0; r < residuals.rows(); ++r) {
      double ss = 0.0;
      for (double v : residuals.row(r)) ss += v * v;
      mean_norm += std::sqrt(ss);
    }
    mean_norm /= static_cast<double>(residuals.rows());
    json args{{"classifier", classifier.string()}, {"data", data.string()}, {"lambda", lambda},
              {"steps", steps},   {"batch-size", batch_size}, {"seed", seed},
              {"train-fraction", split_flags.train_fraction}, {"split-seed", split_flags.seed},
              {"out", out.string()}};
    write_manifest(out, "train-countergan", args,
                   {{"final_d_loss", gan.losses.d_loss.back()},
                    {"final_g_loss", gan.losses.g_loss.back()},
                    {"test_mean_residual_norm", mean_norm}});
    os << "countergan: final D loss " << gan.losses.d_loss.back() << ", G loss " << gan.losses.g_loss.back()
       << ", mean test residual norm " << mean_norm << "\n";
    return kExitOk;
  }
};

struct Benchmark {
  fs::path models_dir;
  fs::path data;
  fs::path out;
  std::size_t limit = 0;
  std::uint64_t data_seed = 0;
  SplitFlags split_flags;
  CLI::Option* data_seed_opt = nullptr;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("benchmark", "Run all three methods over the test split");
    cmd->add_option("--models-dir", models_dir, "Directory with classifier.json, autoencoder.json, countergan.json");
    cmd->add_option("--data", data, "Dataset CSV the models were trained on");
    cmd->add_option("--out", out, "Markdown report path; the CSV goes next to it with a .csv extension");
    cmd->add_option("--limit", limit, "Use only the first N test rows (0: all)")->capture_default_str();
    data_seed_opt = cmd->add_option("--data-seed", data_seed,
                                    "Seed recorded in the report (default: from the data manifest)");
    split_flags.add(cmd);
  }

  std::uint64_t resolve_data_seed() const {
    if (data_seed_opt->count() > 0) return data_seed;
    fs::path manifest = data;
    manifest += ".manifest.json";
    if (!fs::exists(manifest)) return 0;
    const json doc = json::parse(read_file(manifest), nullptr, false);
    if (doc.is_discarded() || !doc.contains("args") || !doc["args"].contains("seed")) return 0;
    return doc["args"]["seed"].get<std::uint64_t>();
  }

  int run(std::ostream& os) const {
    require_out(out);
    const ModelBundle models = load_bundle(models_dir);
    auto [train, test] = load_split(data, split_flags);
    if (limit > 0 && limit < test.size()) {
      std::vector<std::size_t> idx(limit);
      for (std::size_t i = 0; i < limit; ++i) idx[i] = i;
      test = test.subset(idx, test.schema);
    }
    BenchmarkConfig config;
    config.data_seed = resolve_data_seed();
    const BenchmarkReport report = run_benchmark(models, test, config);
    const std::string table = render_table(report);
    write_file_atomic(out, table);
    fs::path csv = out;
    csv.replace_extension(".csv");
    export_csv(report, csv);
    json summary = json::object();
    for (const auto& [m, mr] : report.methods) {
      json per = json::object();
      for (const auto& [metric, rec] : mr.metrics) per[std::string(metric_name(metric))] = rec.mean;
      per["failures"] = mr.failures;
      summary[std::string(method_name(m))] = std::move(per);
    }
    json args{{"models-dir", models_dir.string()}, {"data", data.string()}, {"limit", limit},
              {"data-seed", config.data_seed},     {"train-fraction", split_flags.train_fraction},
              {"split-seed", split_flags.seed},    {"out", out.string()}};
    write_manifest(out, "benchmark", args, summary);
    os << table;
    return kExitOk;
  }
};

struct Explain {
  fs::path models_dir;
  fs::path profile;
  std::string method = "countergan";

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("explain", "Suggest profile edits for one candidate");
    cmd->add_option("--models-dir", models_dir, "Directory with the three model files");
    cmd->add_option("--profile", profile, "JSON object keyed by feature name");
    cmd->add_option("--method", method, "rgd, csgp or countergan")->capture_default_str();
  }

  int run(std::ostream& os) const {
    Method m;
    try {
      m = method_from_string(method);
    } catch (const SpecError& e) {
      throw UserError(std::string("--method: ") + e.what());
    }
    require_path("--profile", profile);
    const ModelBundle models = load_bundle(models_dir);
    const ProfileSchema& schema = models.schema();
    const RawProfile x = parse_profile_json(read_file(profile), schema);
    CfResult result;
    switch (m) {
      case Method::rgd: result = rgd_generate(models.classifier, x, schema); break;
      case Method::csgp:
        result = csgp_generate(models.classifier, models.autoencoder, *models.autoencoder.prototypes, x, schema);
        break;
      case Method::countergan: result = countergan_generate(models.gan, models.classifier, x, schema); break;
    }
    const FeedbackDiff diff = make_diff(x, result, schema);
    os << render_examples(x, {{m, diff}}, schema) << '\n';
    os << "score_before " << format_double(diff.score_before) << " ("
       << (diff.score_before >= kDecisionThreshold ? "approved" : "rejected") << ")\n";
    os << "score_after " << format_double(diff.score_after) << " ("
       << (diff.score_after >= kDecisionThreshold ? "approved" : "rejected") << ")\n";
    for (const DiffEntry& e : diff.changes) {
      os << "change " << e.feature << ' ' << format_double(e.old_value) << ' ' << format_double(e.delta) << ' '
         << format_double(e.new_value) << '\n';
    }
    return kExitOk;
  }
};

struct Serve {
  ServiceConfig config;
  std::string method = "countergan";
  std::string model_dir = "models";

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("serve", "Serve the JSON API over HTTP");
    cmd->add_option("--models-dir", model_dir, "Model directory")->envname("RECOURSE_MODEL_DIR")->capture_default_str();
    cmd->add_option("--host", config.host, "Bind address")->envname("RECOURSE_HOST")->capture_default_str();
    cmd->add_option("--port", config.port, "Port (0: any free port)")
        ->envname("RECOURSE_PORT")
        ->capture_default_str()
        ->check(CLI::Range(0, 65535));
    cmd->add_option("--method", method, "Default method for /counterfactual")->capture_default_str();
    cmd->add_option("--request-log", config.request_log, "Append one line per request to this file");
  }

  int run(std::ostream& os) {
    try {
      config.default_method = method_from_string(method);
    } catch (const SpecError& e) {
      throw UserError(std::string("--method: ") + e.what());
    }
    require_path("--models-dir", model_dir, true);
    config.model_dir = model_dir;
    FeedbackService service(config);
    service.load();
    const int port = service.bind();
    os << "listening on " << config.host << ':' << port << std::endl;
    service.listen();
    return kExitOk;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual feedback for candidate profiles"};
  app.name("recourse");
  app.require_subcommand(1);
  GenData gen_data;
  TrainClassifier train_clf;
  TrainAutoencoder train_ae;
  TrainCountergan train_gan;
  Benchmark benchmark;
  Explain explain;
  Serve serve;
  gen_data.add(app);
  train_clf.add(app);
  train_ae.add(app);
  train_gan.add(app);
  benchmark.add(app);
  explain.add(app);
  serve.add(app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "gen-data") return gen_data.run(out);
    if (name == "train-classifier") return train_clf.run(out);
    if (name == "train-autoencoder") return train_ae.run(out);
    if (name == "train-countergan") return train_gan.run(out);
    if (name == "benchmark") return benchmark.run(out);
    if (name == "explain") return explain.run(out);
    if (name == "serve") return serve.run(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace recourse
