#include "recourse/benchmark/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recourse/error.hpp"

namespace recourse {

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::realism: return "realism";
    case Metric::prediction_gain: return "prediction_gain";
    case Metric::actionability: return "actionability";
    case Metric::latency_ms: return "latency_ms";
    case Metric::batch_latency_s: return "batch_latency_s";
  }
  return "realism";
}

std::string_view metric_label(Metric m) {
  switch (m) {
    case Metric::realism: return "Realism";
    case Metric::prediction_gain: return "Prediction gain";
    case Metric::actionability: return "Actionability";
    case Metric::latency_ms: return "Latency (ms)";
    case Metric::batch_latency_s: return "Batch latency (s)";
  }
  return "Realism";
}

Metric metric_from_string(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (name == metric_name(m)) return m;
  }
  throw SpecError("unknown metric '" + std::string(name) + "'");
}

bool lower_is_better(Metric m) { return m != Metric::prediction_gain; }

double realism_metric(const AutoencoderModel& ae, const CfResult& result) {
  return reconstruction_error(ae, result.normalized);
}

double prediction_gain(double score_before, double score_after) { return score_after - score_before; }

double prediction_gain(const CfResult& result) { return prediction_gain(result.score_before, result.score_after); }

double actionability_metric(std::span<const double> x, std::span<const double> x_cf) {
  if (x.size() != x_cf.size()) throw SpecError("actionability: width mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) total += std::abs(x_cf[j] - x[j]);
  return total;
}

double actionability_metric(const NormalizedProfile& x, const CfResult& result) {
  return actionability_metric(x.values, result.normalized.values);
}

Interval ci95(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, 1.96 * sd / std::sqrt(static_cast<double>(n))};
}

Clock default_clock() {
  return [] { return std::chrono::steady_clock::now(); };
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start, std::chrono::steady_clock::time_point stop) {
  if (stop < start) throw MeasurementError("latency: clock went backwards");
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace

Vector measure_latency(const std::function<void(std::size_t)>& call, std::size_t count, std::size_t warmup,
                       const Clock& clock) {
  if (count == 0) throw SpecError("latency: nothing to measure");
  for (std::size_t w = 0; w < warmup; ++w) call(0);
  Vector out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto start = clock();
    call(i);
    out[i] = elapsed_ms(start, clock());
  }
  return out;
}

BatchTiming measure_batch_latency(const std::function<void(const SampleTimer&)>& batch,
                                  const std::function<void(std::size_t)>& call, std::size_t warmup,
                                  const Clock& clock) {
  for (std::size_t w = 0; w < warmup; ++w) call(0);
  BatchTiming timing;
  const SampleTimer timer = [&](const std::function<void()>& sample) {
    const auto start = clock();
    sample();
    const double ms = elapsed_ms(start, clock());
    timing.sample_ms.push_back(ms);
    timing.max_sample_ms = std::max(timing.max_sample_ms, ms);
  };
  const auto start = clock();
  batch(timer);
  timing.seconds = elapsed_ms(start, clock()) / 1000.0;
  return timing;
}

}  // namespace recourse
