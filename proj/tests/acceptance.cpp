// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <unistd.h>

#include "recourse/benchmark/report.hpp"
#include "recourse/benchmark/runner.hpp"
#include "recourse/cli/commands.hpp"
#include "recourse/predictors/model_io.hpp"
#include "recourse/profiles/csv.hpp"
#include "recourse/util/files.hpp"
#include "support/pipeline.hpp"

using namespace recourse;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean_of(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(std::move(args), o, e);
  if (out) *out = o.str();
  if (code != 0) std::cerr << e.str();
  return code;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("recourse_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Shared across criteria 4-6: the full seed-42 benchmark.
const BenchmarkReport& default_report() {
  static const BenchmarkReport report = [] {
    const auto& p = testing::default_pipeline();
    return run_benchmark(p.bundle(), p.test, BenchmarkConfig{.data_seed = 42});
  }();
  return report;
}

Outcome gradient_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  Rand rng(2024);
  double worst = 0.0;
  std::size_t checked = 0;
  constexpr int kArchitectures = 24;
  for (int i = 0; i < kArchitectures; ++i) {
    const MlpSpec spec = testing::random_spec(rng);
    const testing::GradCheck g = testing::finite_difference_check(spec, rng);
    worst = std::max({worst, g.param_error, g.input_error});
    checked += g.checked;
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 30.0,
          fmt("%d architectures, %zu gradients, max relative error %.2e, %.2f s", kArchitectures, checked, worst,
              secs)};
}

Outcome data_calibration() {
  const fs::path csv = scratch_dir() / "calibration.csv";
  if (cli({"gen-data", "--n", "3029", "--seed", "42", "--out", csv.string()}) != 0) return {false, "gen-data failed"};
  const Dataset data = load_csv(csv);
  const double rate = data.positive_rate();
  Rand rng(42);
  const auto [train, test] = split(data, 0.8, rng);
  const bool ok = data.size() == 3029 && rate >= 0.42 && rate <= 0.44 && train.size() == 2423 && test.size() == 606;
  return {ok, fmt("rows %zu, positive rate %.4f, split %zu/%zu", data.size(), rate, train.size(), test.size())};
}

Outcome classifier_quality() {
  const auto& p = testing::default_pipeline();
  const TrainConfig config{};
  Rand rng(config.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const auto [model, report] = train_classifier(p.train, p.test, config, rng);
  const double secs = seconds_since(t0);
  const double acc = accuracy(model, p.test);
  return {acc >= 0.70 && acc <= 0.90 && secs < 60.0, fmt("test accuracy %.4f, training %.2f s", acc, secs)};
}

Outcome constraint_suite() {
  const auto& p = testing::default_pipeline();
  const ProfileSchema& schema = p.schema();
  const BenchmarkReport& r = default_report();
  // RGD runs unclamped by default, so bounds are only required of the other two.
  std::size_t checked = 0, violations = 0, failures = 0, rgd_out_of_range = 0;
  for (const auto& [method, mr] : r.methods) {
    failures += mr.failures;
    for (std::size_t i = 0; i < mr.samples.size(); ++i) {
      const SampleRecord& s = mr.samples[i];
      if (!s.ok) continue;
      const RawProfile x = p.test.raw_profile(i);
      for (std::size_t j = 0; j < schema.size(); ++j) {
        const FeatureSpec& f = schema.feature(j);
        const double v = s.result.raw.values[j];
        const bool in_bounds = v >= f.lower_bound && v <= f.upper_bound;
        bool ok = f.satisfies_kind(v) && (in_bounds || method == Method::rgd);
        rgd_out_of_range += method == Method::rgd && !in_bounds ? 1 : 0;
        if (!f.is_mutable) ok = ok && std::memcmp(&v, &x.values[j], sizeof v) == 0;
        if (f.kind == FeatureKind::integer) ok = ok && v == std::round(v);
        if (f.kind == FeatureKind::multiple_of) ok = ok && std::fmod(v, f.step) == 0.0;
        violations += ok ? 0 : 1;
      }
      ++checked;
    }
  }
  return {violations == 0 && failures == 0 && checked == 3 * p.test.size(),
          fmt("%zu counterfactuals, %zu violations, %zu engine failures (RGD values outside bounds: %zu)", checked,
              violations, failures, rgd_out_of_range)};
}

Outcome latency_ordering() {
  const BenchmarkReport& r = default_report();
  auto latency = [&](Method m) { return r.methods.at(m).metrics.at(Metric::latency_ms).mean; };
  const double gan = latency(Method::countergan);
  const double rgd = latency(Method::rgd);
  const double csgp = latency(Method::csgp);
  const double batch = r.methods.at(Method::countergan).metrics.at(Metric::batch_latency_s).mean;
  const bool ok = gan < 10.0 && rgd >= 100.0 * gan && csgp >= 100.0 * gan && batch < 1.0;
  return {ok, fmt("per sample: CounteRGAN %.4f ms, RGD %.3f ms (x%.0f), CSGP %.3f ms (x%.0f); CounteRGAN batch %.4f s",
                  gan, rgd, rgd / gan, csgp, csgp / gan, batch)};
}

Outcome efficacy_ordering() {
  const auto& p = testing::default_pipeline();
  const auto rejected = p.rejected_rows();
  const BenchmarkReport& r = default_report();
  std::map<Method, double> gain;
  std::size_t flips = 0;
  for (const auto& [method, mr] : r.methods) {
    Vector g;
    for (std::size_t i : rejected) {
      if (mr.samples[i].ok) g.push_back(mr.samples[i].prediction_gain);
      if (method == Method::rgd && mr.samples[i].ok && mr.samples[i].result.score_after >= 0.5) ++flips;
    }
    gain[method] = mean_of(g);
  }
  const double flip_rate = static_cast<double>(flips) / static_cast<double>(rejected.size());
  const bool ok = gain[Method::rgd] > 0.0 && gain[Method::csgp] > 0.0 && gain[Method::countergan] > 0.0 &&
                  gain[Method::rgd] > gain[Method::csgp] && gain[Method::rgd] > gain[Method::countergan] &&
                  flip_rate >= 0.90;
  return {ok, fmt("%zu rejected rows; gain RGD %.4f, CSGP %.4f, CounteRGAN %.4f; RGD flips %.3f", rejected.size(),
                  gain[Method::rgd], gain[Method::csgp], gain[Method::countergan], flip_rate)};
}

Outcome realism_ordering() {
  auto means = [](const testing::Pipeline& p) {
    Vector rgd, gan;
    for (std::size_t i = 0; i < p.test.size(); ++i) {
      const RawProfile x = p.test.raw_profile(i);
      rgd.push_back(realism_metric(p.autoencoder, rgd_generate(p.classifier, x, p.schema())));
      gan.push_back(realism_metric(p.autoencoder, countergan_generate(p.gan, p.classifier, x, p.schema())));
    }
    return std::pair{mean_of(gan), mean_of(rgd)};
  };
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {42u, 43u, 44u}) {
    const auto [gan, rgd] = seed == 42 ? means(testing::default_pipeline()) : means(testing::build_pipeline(seed));
    ok = ok && gan <= rgd;
    detail += fmt("%sseed %llu: CounteRGAN %.3f vs RGD %.3f", detail.empty() ? "" : "; ",
                  static_cast<unsigned long long>(seed), gan, rgd);
  }
  return {ok, detail};
}

Outcome regularizer_behavior() {
  const auto& p = testing::default_pipeline();
  auto mean_norm = [&](double lambda) {
    CounterganConfig config = default_countergan_config(p.train.width());
    config.reg_weight = lambda;
    Rand rng(config.seed);
    const GanModels gan = countergan_train(p.classifier, p.train, p.schema(), config, rng);
    const Matrix r = masked_residuals(gan, p.test.rows);
    double total = 0.0;
    for (std::size_t i = 0; i < r.rows(); ++i) {
      double ss = 0.0;
      for (double v : r.row(i)) ss += v * v;
      total += std::sqrt(ss);
    }
    return total / static_cast<double>(r.rows());
  };
  const double weak = mean_norm(0.01);
  const double strong = mean_norm(10.0);
  return {strong < weak, fmt("mean ||G(x)||: lambda 0.01 -> %.4f, lambda 10 -> %.4f", weak, strong)};
}

// gen-data, train x3 and benchmark through the CLI into `dir`.
bool run_pipeline(const fs::path& dir) {
  fs::create_directories(dir / "models");
  const std::string data = (dir / "data.csv").string();
  const std::string m = (dir / "models").string();
  return cli({"gen-data", "--n", "3029", "--seed", "42", "--out", data}) == 0 &&
         cli({"train-classifier", "--data", data, "--out", m + "/classifier.json"}) == 0 &&
         cli({"train-autoencoder", "--data", data, "--out", m + "/autoencoder.json"}) == 0 &&
         cli({"train-countergan", "--classifier", m + "/classifier.json", "--data", data, "--out",
              m + "/countergan.json"}) == 0 &&
         cli({"benchmark", "--models-dir", m, "--data", data, "--out", (dir / "report.md").string()}) == 0;
}

Outcome determinism() {
  const fs::path a = scratch_dir() / "run_a";
  const fs::path b = scratch_dir() / "run_b";
  if (!run_pipeline(a) || !run_pipeline(b)) return {false, "pipeline run failed"};
  std::size_t compared = 0, differing = 0;
  for (const char* file : {"data.csv", "models/classifier.json", "models/autoencoder.json", "models/countergan.json"}) {
    ++compared;
    differing += read_file(a / file) == read_file(b / file) ? 0 : 1;
  }
  const auto rows_a = parse_report_csv(read_file(a / "report.csv"));
  const auto rows_b = parse_report_csv(read_file(b / "report.csv"));
  if (rows_a.size() != 15 || rows_b.size() != 15) return {false, "report does not hold 3 x 5 metrics"};
  for (std::size_t i = 0; i < rows_a.size(); ++i) {
    const Metric metric = metric_from_string(rows_a[i].metric);
    if (metric == Metric::latency_ms || metric == Metric::batch_latency_s) continue;
    ++compared;
    const bool same = rows_a[i].method == rows_b[i].method && rows_a[i].metric == rows_b[i].metric &&
                      std::memcmp(&rows_a[i].mean, &rows_b[i].mean, sizeof(double)) == 0 &&
                      std::memcmp(&rows_a[i].ci_half_width, &rows_b[i].ci_half_width, sizeof(double)) == 0 &&
                      rows_a[i].n == rows_b[i].n && rows_a[i].failures == rows_b[i].failures;
    differing += same ? 0 : 1;
  }
  return {differing == 0, fmt("%zu artifacts and report rows compared, %zu differ", compared, differing)};
}

Outcome explain_smoke() {
  // Fixture: first rejected test row of the CLI-built pipeline that the
  // trained generator flips. Depends on the run_a artifacts from criterion 9.
  const fs::path dir = scratch_dir() / "run_a";
  if (!fs::exists(dir / "models" / "countergan.json") && !run_pipeline(dir)) return {false, "pipeline run failed"};
  const Dataset data = load_csv(dir / "data.csv");
  Rand rng(42);
  const Dataset test = split(data, 0.8, rng).second;
  const ClassifierModel classifier = load_classifier(dir / "models" / "classifier.json");
  const GanModels gan = load_gan(dir / "models" / "countergan.json");
  const ProfileSchema& schema = *classifier.schema;
  std::optional<std::size_t> fixture;
  for (std::size_t i = 0; i < test.size() && !fixture; ++i) {
    const CfResult r = countergan_generate(gan, classifier, test.raw_profile(i), schema);
    if (r.score_before < 0.5 && r.score_after >= 0.5) fixture = i;
  }
  if (!fixture) return {false, "no rejected test row is flipped by the generator"};
  const fs::path profile = dir / "fixture.json";
  write_file_atomic(profile, profile_to_json(test.raw_profile(*fixture), schema).dump(2));

  std::string out;
  if (cli({"explain", "--models-dir", (dir / "models").string(), "--profile", profile.string(), "--method",
           "countergan"},
          &out) != 0) {
    return {false, "explain failed"};
  }
  std::istringstream lines(out);
  std::string line;
  double before = -1.0, after = -1.0;
  std::size_t changes = 0, exact = 0;
  while (std::getline(lines, line)) {
    std::istringstream words(line);
    std::string tag;
    words >> tag;
    if (tag == "score_before") words >> before;
    if (tag == "score_after") words >> after;
    if (tag == "change") {
      std::string feature;
      double old_value = 0.0, delta = 0.0, new_value = 0.0;
      words >> feature >> old_value >> delta >> new_value;
      ++changes;
      exact += old_value + delta == new_value ? 1 : 0;
    }
  }
  const bool has_table = out.find("*Classifier score*") != std::string::npos;
  const bool ok = has_table && before >= 0.0 && before < 0.5 && after >= 0.5 && changes > 0 && exact == changes;
  return {ok, fmt("test row %zu: score %.4f -> %.4f, %zu changes, %zu exact", *fixture, before, after, changes, exact)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Gradient fidelity", gradient_fidelity},   {"Data calibration", data_calibration},
      {"Classifier quality", classifier_quality}, {"Constraint suite", constraint_suite},
      {"Latency ordering", latency_ordering},     {"Efficacy ordering", efficacy_ordering},
      {"Realism ordering", realism_ordering},     {"Regularizer behavior", regularizer_behavior},
      {"Determinism", determinism},               {"Explain smoke test", explain_smoke},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::error_code ec;
  fs::remove_all(scratch_dir(), ec);
  std::cout << (criteria.size() - failed) << '/' << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
