#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <thread>

#include "recourse/benchmark/metrics.hpp"
#include "recourse/benchmark/report.hpp"
#include "recourse/benchmark/runner.hpp"
#include "recourse/error.hpp"
#include "recourse/util/files.hpp"
#include "support/pipeline.hpp"

using namespace recourse;
using recourse::testing::default_pipeline;

namespace {

// Welford's running update, independent of the two-pass ci95.
Interval welford_ci95(const Vector& v) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v[i] - mean);
  }
  const double n = static_cast<double>(v.size());
  return {mean, 1.96 * std::sqrt(m2 / (n - 1.0)) / std::sqrt(n)};
}

Dataset first_rows(const Dataset& d, std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return d.subset(idx);
}

MetricRecord record(Metric m, double mean, double half) { return MetricRecord{m, {}, mean, half}; }

// Fixed numbers, no models: the golden table depends only on rendering.
BenchmarkReport synthetic_report() {
  BenchmarkReport r;
  r.n_rows = 606;
  r.data_seed = 42;
  r.classifier_accuracy = 0.8481848;
  r.timestamp = "2026-01-01T00:00:00Z";
  const double values[3][5] = {{1.25, 0.31, 1.5, 2.8, 1.7},
                               {0.9, 0.06, 1.25, 7.4, 4.5},
                               {0.75, 0.05, 0.32, 0.014, 0.006}};
  const double halves[3][4] = {{0.05, 0.012, 0.04, 0.1}, {0.04, 0.006, 0.03, 0.3}, {0.03, 0.004, 0.01, 0.001}};
  std::size_t k = 0;
  for (Method m : kAllMethods) {
    MethodReport& mr = r.methods[m];
    mr.method = m;
    mr.successes = 606 - k;
    mr.failures = k;
    for (std::size_t j = 0; j < 5; ++j) {
      const Metric metric = kAllMetrics[j];
      mr.metrics[metric] = record(metric, values[k][j], j < 4 ? halves[k][j] : 0.0);
    }
    ++k;
  }
  return r;
}

}  // namespace

TEST_SUITE("benchmark") {

TEST_CASE("metric names and directions") {
  for (Metric m : kAllMetrics) CHECK(metric_from_string(metric_name(m)) == m);
  CHECK(lower_is_better(Metric::realism));
  CHECK_FALSE(lower_is_better(Metric::prediction_gain));
  CHECK(lower_is_better(Metric::actionability));
  CHECK_THROWS_AS(metric_from_string("speed"), SpecError);
}

TEST_CASE("prediction gain examples") {
  CHECK(prediction_gain(0.35, 0.72) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(prediction_gain(0.45, 0.62) == doctest::Approx(0.17).epsilon(1e-12));
  CHECK(prediction_gain(0.3, 0.3) == 0.0);
}

TEST_CASE("actionability examples and naive oracle") {
  const Vector zero{0.0, 0.0};
  const Vector moved{0.3, -0.1};
  CHECK(actionability_metric(zero, zero) == 0.0);
  CHECK(actionability_metric(zero, moved) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_THROWS_AS(actionability_metric(zero, Vector{1.0}), SpecError);

  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Vector a(33), b(33);
    for (double& v : a) v = nd(gen);
    for (double& v : b) v = nd(gen);
    double naive = 0.0;
    for (std::size_t j = 0; j < 33; ++j) naive += a[j] > b[j] ? a[j] - b[j] : b[j] - a[j];
    CHECK(std::abs(actionability_metric(a, b) - naive) <= 1e-12);
  }
}

TEST_CASE("realism delegates to reconstruction error") {
  const auto& p = default_pipeline();
  const CfResult r = countergan_generate(p.gan, p.classifier, p.test.raw_profile(3), p.schema());
  CHECK(realism_metric(p.autoencoder, r) == reconstruction_error(p.autoencoder, r.normalized));
}

TEST_CASE("ci95 closed forms and oracle") {
  const Interval constant = ci95(Vector{2, 2, 2, 2});
  CHECK(constant.mean == 2.0);
  CHECK(constant.half_width == 0.0);
  const Interval pair = ci95(Vector{0, 1});
  CHECK(pair.mean == 0.5);
  CHECK(pair.half_width == doctest::Approx(1.96 * std::sqrt(0.5) / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(pair.half_width == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(ci95(Vector{7.0}).half_width == 0.0);
  CHECK(ci95(Vector{}).mean == 0.0);

  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> ud(-3.0, 5.0);
  for (std::size_t n : {2u, 5u, 100u, 606u}) {
    Vector v(n);
    for (double& x : v) x = ud(gen);
    const Interval a = ci95(v);
    const Interval b = welford_ci95(v);
    CHECK(std::abs(a.mean - b.mean) <= 1e-12);
    CHECK(std::abs(a.half_width - b.half_width) <= 1e-12);
  }
}

TEST_CASE("latency: sleeping stub, backward clock, zero count") {
  const Vector ms = measure_latency(
      [](std::size_t) { std::this_thread::sleep_for(std::chrono::milliseconds(5)); }, 6);
  double mean = 0.0;
  for (double v : ms) mean += v;
  mean /= static_cast<double>(ms.size());
  CHECK(mean >= 5.0);
  CHECK(mean <= 15.0);

  auto t = std::chrono::steady_clock::time_point{} + std::chrono::hours(1);
  Clock backwards = [&t] {
    t -= std::chrono::milliseconds(1);
    return t;
  };
  CHECK_THROWS_AS(measure_latency([](std::size_t) {}, 3, 0, backwards), MeasurementError);
  CHECK_THROWS_AS(measure_latency([](std::size_t) {}, 0), SpecError);
}

TEST_CASE("latency: warmup calls are excluded") {
  std::vector<std::size_t> seen;
  measure_latency([&](std::size_t i) { seen.push_back(i); }, 3, 5);
  CHECK(seen == std::vector<std::size_t>{0, 0, 0, 0, 0, 0, 1, 2});
}

TEST_CASE("batch latency contains every sample timed inside it") {
  const BatchTiming timing = measure_batch_latency(
      [](const SampleTimer& timer) {
        for (int i = 1; i <= 4; ++i) timer([i] { std::this_thread::sleep_for(std::chrono::milliseconds(i)); });
      },
      [](std::size_t) {});
  REQUIRE(timing.sample_ms.size() == 4);
  CHECK(timing.max_sample_ms == *std::max_element(timing.sample_ms.begin(), timing.sample_ms.end()));
  CHECK(timing.seconds * 1000.0 >= timing.max_sample_ms);
  CHECK(timing.max_sample_ms >= 4.0);
}

TEST_CASE("run_benchmark: shape, aggregation, failure accounting") {
  const auto& p = default_pipeline();
  const Dataset rows = first_rows(p.test, 40);
  const BenchmarkReport r = run_benchmark(p.bundle(), rows, BenchmarkConfig{.data_seed = 42});
  CHECK(r.methods.size() == 3);
  CHECK(r.n_rows == 40);
  CHECK(r.data_seed == 42);
  CHECK(r.timestamp.size() == 20);
  for (const auto& [method, mr] : r.methods) {
    CHECK(mr.metrics.size() == 5);
    CHECK(mr.successes + mr.failures == 40);
    CHECK(mr.samples.size() == 40);
    for (const auto& [metric, rec] : mr.metrics) {
      CHECK(rec.ci_half_width >= 0.0);
      CHECK(std::isfinite(rec.mean));
      if (metric == Metric::batch_latency_s) {
        CHECK(rec.values.empty());
        continue;
      }
      REQUIRE(rec.values.size() == mr.successes);
      double sum = 0.0;
      for (double v : rec.values) sum += v;
      CHECK(std::abs(sum / static_cast<double>(rec.values.size()) - rec.mean) <= 1e-12);
    }
    for (std::size_t i = 0; i < 40; ++i) CHECK(mr.samples[i].row_id == rows.ids[i]);
    CHECK(mr.metrics.at(Metric::prediction_gain).mean > 0.0);
  }
  CHECK(r.methods.at(Method::countergan).metrics.at(Metric::batch_latency_s).mean <
        r.methods.at(Method::rgd).metrics.at(Metric::batch_latency_s).mean);

  BenchmarkConfig broken;
  broken.rgd.learning_rate = 1e308;
  const BenchmarkReport f = run_benchmark(p.bundle(), rows, broken);
  const MethodReport& rgd = f.methods.at(Method::rgd);
  CHECK(rgd.failures > 0);
  CHECK(rgd.successes + rgd.failures == 40);
  CHECK(rgd.metrics.at(Metric::realism).values.size() == rgd.successes);
  for (const SampleRecord& s : rgd.samples) {
    if (!s.ok) CHECK_FALSE(s.error.empty());
  }
}

TEST_CASE("property: non-latency metrics are pure in row order and reruns") {
  const auto& p = default_pipeline();
  std::vector<std::size_t> idx(30);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i * 20;
  const Dataset ordered = p.test.subset(idx);
  std::shuffle(idx.begin(), idx.end(), std::mt19937_64(5));
  const Dataset shuffled = p.test.subset(idx);

  const BenchmarkReport a = run_benchmark(p.bundle(), ordered);
  const BenchmarkReport b = run_benchmark(p.bundle(), shuffled);
  const BenchmarkReport c = run_benchmark(p.bundle(), ordered);
  for (Method m : kAllMethods) {
    std::map<std::size_t, const SampleRecord*> by_id;
    for (const SampleRecord& s : b.methods.at(m).samples) by_id[s.row_id] = &s;
    for (std::size_t i = 0; i < 30; ++i) {
      const SampleRecord& s = a.methods.at(m).samples[i];
      const SampleRecord& t = *by_id.at(s.row_id);
      CHECK(s.realism == t.realism);
      CHECK(s.prediction_gain == t.prediction_gain);
      CHECK(s.actionability == t.actionability);
      const SampleRecord& u = c.methods.at(m).samples[i];
      CHECK(s.realism == u.realism);
      CHECK(s.prediction_gain == u.prediction_gain);
      CHECK(s.actionability == u.actionability);
    }
  }
}

TEST_CASE("run_benchmark rejects a mismatched test split") {
  const auto& p = default_pipeline();
  CHECK_THROWS_AS(run_benchmark(p.bundle(), p.test.subset(std::vector<std::size_t>{0, 1}, p.data.schema)),
                  SpecError);
  ModelBundle missing = p.bundle();
  missing.autoencoder.prototypes.reset();
  CHECK_THROWS_AS(run_benchmark(missing, first_rows(p.test, 2)), SpecError);
}

TEST_CASE("render_table matches the golden file") {
  const std::string table = render_table(synthetic_report());
  const std::filesystem::path golden = std::filesystem::path(RECOURSE_TEST_DATA_DIR) / "golden" / "report_table.md";
  if (std::getenv("RECOURSE_UPDATE_GOLDEN") != nullptr) write_file_atomic(golden, table);
  CHECK(table == read_file(golden));
}

TEST_CASE("render_table marks direction on every metric row") {
  const std::string table = render_table(synthetic_report());
  CHECK(table.find("| ↓ Realism |") != std::string::npos);
  CHECK(table.find("| ↑ Prediction gain |") != std::string::npos);
  CHECK(table.find("| ↓ Actionability |") != std::string::npos);
  CHECK(table.find("**0.750 ± 0.030**") != std::string::npos);
}

TEST_CASE("csv round-trip and malformed input") {
  const BenchmarkReport r = synthetic_report();
  const auto rows = parse_report_csv(report_to_csv(r));
  CHECK(rows.size() == 15);
  for (const CsvRow& row : rows) {
    const MethodReport& mr = r.methods.at(method_from_string(row.method));
    const MetricRecord& rec = mr.metrics.at(metric_from_string(row.metric));
    CHECK(std::abs(row.mean - rec.mean) <= 1e-9);
    CHECK(std::abs(row.ci_half_width - rec.ci_half_width) <= 1e-9);
    CHECK(row.failures == mr.failures);
  }

  const std::filesystem::path path = std::filesystem::temp_directory_path() / "recourse_report_test.csv";
  export_csv(r, path);
  CHECK(parse_report_csv(read_file(path)).size() == 15);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(parse_report_csv("method,metric,mean,ci_half_width,n,failures\nrgd,realism,abc,0,1,0\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_report_csv("method,metric\n"), ParseError);
}

TEST_CASE("render_examples lists mutable features and the score row") {
  const auto& p = default_pipeline();
  const ProfileSchema& s = p.schema();
  const RawProfile x = p.test.raw_profile(p.rejected_rows()[0]);
  std::map<Method, FeedbackDiff> diffs;
  diffs[Method::rgd] = make_diff(x, rgd_generate(p.classifier, x, s), s);
  diffs[Method::countergan] = make_diff(x, countergan_generate(p.gan, p.classifier, x, s), s);
  const std::string text = render_examples(x, diffs, s);
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == 2 + 6 + 1);
  CHECK(text.find("expected_salary") != std::string::npos);
  CHECK(text.find("has_phd") == std::string::npos);
  CHECK(text.find("*Classifier score*") != std::string::npos);
}

}  // TEST_SUITE
