#include "recourse/benchmark/runner.hpp"

#include <ctime>

#include "recourse/error.hpp"
#include "recourse/predictors/prototypes.hpp"

namespace recourse {

void ModelBundle::validate() const {
  if (!classifier.schema || !autoencoder.schema || !gan.schema) throw SpecError("models: missing schema");
  const std::string hash = classifier.schema->hash();
  if (autoencoder.schema->hash() != hash) throw SpecError("models: autoencoder schema differs from classifier");
  if (gan.schema->hash() != hash) throw SpecError("models: countergan schema differs from classifier");
  if (!autoencoder.prototypes) throw SpecError("models: autoencoder carries no prototypes (needed by csgp)");
}

void aggregate(MethodReport& report) {
  MetricRecord realism{Metric::realism, {}, 0.0, 0.0};
  MetricRecord gain{Metric::prediction_gain, {}, 0.0, 0.0};
  MetricRecord action{Metric::actionability, {}, 0.0, 0.0};
  MetricRecord latency{Metric::latency_ms, {}, 0.0, 0.0};
  report.successes = 0;
  report.failures = 0;
  for (const SampleRecord& s : report.samples) {
    if (!s.ok) {
      ++report.failures;
      continue;
    }
    ++report.successes;
    realism.values.push_back(s.realism);
    gain.values.push_back(s.prediction_gain);
    action.values.push_back(s.actionability);
    latency.values.push_back(s.latency_ms);
  }
  for (MetricRecord* r : {&realism, &gain, &action, &latency}) {
    const Interval ci = ci95(r->values);
    r->mean = ci.mean;
    r->ci_half_width = ci.half_width;
    report.metrics[r->metric] = std::move(*r);
  }
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void score_sample(SampleRecord& s, const AutoencoderModel& ae, const NormalizedProfile& x) {
  s.realism = realism_metric(ae, s.result);
  s.prediction_gain = prediction_gain(s.result);
  s.actionability = actionability_metric(x, s.result);
}

template <class Generate>
void run_sample(SampleRecord& s, Generate&& generate) {
  try {
    s.result = generate();
    s.ok = true;
  } catch (const Error& e) {
    s.ok = false;
    s.error = e.what();
  }
}

MethodReport run_method(Method method, const ModelBundle& models, const Dataset& test, const BenchmarkConfig& config) {
  const ProfileSchema& schema = models.schema();
  const std::size_t n = test.size();
  MethodReport report;
  report.method = method;
  report.samples.resize(n);

  auto generate_row = [&](std::size_t i) -> CfResult {
    const RawProfile x = test.raw_profile(i);
    switch (method) {
      case Method::rgd: return rgd_generate(models.classifier, x, schema, config.rgd);
      case Method::csgp:
        return csgp_generate(models.classifier, models.autoencoder, *models.autoencoder.prototypes, x, schema,
                             config.csgp);
      case Method::countergan:
        return countergan_generate(models.gan, models.classifier, x, schema, config.countergan_enforce_bounds);
    }
    throw SpecError("benchmark: unknown method");
  };
  auto warm = [&](std::size_t i) {
    SampleRecord scratch;
    run_sample(scratch, [&] { return generate_row(i); });
  };

  double batch_seconds = 0.0;
  if (method == Method::countergan) {
    const Vector ms = measure_latency(
        [&](std::size_t i) { run_sample(report.samples[i], [&] { return generate_row(i); }); }, n, config.warmup);
    for (std::size_t i = 0; i < n; ++i) report.samples[i].latency_ms = ms[i];
    const BatchTiming timing = measure_batch_latency(
        [&](const SampleTimer& timer) {
          timer([&] {
            countergan_generate_batch(models.gan, models.classifier, test.raw, schema,
                                      config.countergan_enforce_bounds);
          });
        },
        [&](std::size_t) {
          countergan_generate_batch(models.gan, models.classifier, test.raw, schema,
                                    config.countergan_enforce_bounds);
        },
        config.warmup);
    batch_seconds = timing.seconds;
  } else {
    // Iterative methods: the batch run is a sequential loop whose per-row
    // timings double as the per-sample latencies.
    const BatchTiming timing = measure_batch_latency(
        [&](const SampleTimer& timer) {
          for (std::size_t i = 0; i < n; ++i) {
            timer([&] { run_sample(report.samples[i], [&] { return generate_row(i); }); });
          }
        },
        warm, config.warmup);
    for (std::size_t i = 0; i < n; ++i) report.samples[i].latency_ms = timing.sample_ms[i];
    batch_seconds = timing.seconds;
  }

  for (std::size_t i = 0; i < n; ++i) {
    SampleRecord& s = report.samples[i];
    s.row_id = test.ids[i];
    if (s.ok) score_sample(s, models.autoencoder, test.normalized(i));
  }
  aggregate(report);
  report.metrics[Metric::batch_latency_s] = MetricRecord{Metric::batch_latency_s, {}, batch_seconds, 0.0};
  return report;
}

}  // namespace

BenchmarkReport run_benchmark(const ModelBundle& models, const Dataset& test, const BenchmarkConfig& config) {
  models.validate();
  if (!test.schema || test.schema->hash() != models.schema().hash()) {
    throw SpecError("benchmark: test split is not normalized with the models' schema");
  }
  if (test.size() == 0) throw SpecError("benchmark: empty test split");
  BenchmarkReport report;
  report.n_rows = test.size();
  report.data_seed = config.data_seed;
  report.classifier_accuracy = accuracy(models.classifier, test);
  report.timestamp = utc_timestamp();
  for (Method m : kAllMethods) report.methods[m] = run_method(m, models, test, config);
  return report;
}

}  // namespace recourse
