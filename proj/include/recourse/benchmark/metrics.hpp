#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>

#include "recourse/engines/result.hpp"
#include "recourse/predictors/autoencoder.hpp"

namespace recourse {

enum class Metric { realism, prediction_gain, actionability, latency_ms, batch_latency_s };

inline constexpr Metric kAllMetrics[] = {Metric::realism, Metric::prediction_gain, Metric::actionability,
                                         Metric::latency_ms, Metric::batch_latency_s};

std::string_view metric_name(Metric m);   // "realism", "prediction_gain", ...
std::string_view metric_label(Metric m);  // "Realism", "Prediction gain", "Latency (ms)", ...
Metric metric_from_string(std::string_view name);
bool lower_is_better(Metric m);

// ||AE(x_cf) - x_cf||^2 on the normalized counterfactual.
double realism_metric(const AutoencoderModel& ae, const CfResult& result);
// score_after - score_before
double prediction_gain(const CfResult& result);
double prediction_gain(double score_before, double score_after);
// ||x_cf - x||_1 in normalized space.
double actionability_metric(const NormalizedProfile& x, const CfResult& result);
double actionability_metric(std::span<const double> x, std::span<const double> x_cf);

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;
};

// Normal approximation: mean +- 1.96 s / sqrt(n), s the sample sd.
// half_width is 0 for n <= 1; an empty sample gives {0, 0}.
Interval ci95(std::span<const double> values);

using Clock = std::function<std::chrono::steady_clock::time_point()>;

// Monotonic wall clock; tests inject their own.
Clock default_clock();

inline constexpr std::size_t kLatencyWarmup = 5;

// Calls `call(i)` for every i < count after `warmup` untimed calls on index 0
// and returns each call's wall time in milliseconds. Runs on the calling
// thread. Throws MeasurementError when the clock goes backwards and
// SpecError when count == 0.
Vector measure_latency(const std::function<void(std::size_t)>& call, std::size_t count,
                       std::size_t warmup = kLatencyWarmup, const Clock& clock = default_clock());

struct BatchTiming {
  double seconds = 0.0;        // the whole run
  double max_sample_ms = 0.0;  // slowest timed call inside the run
  Vector sample_ms;            // one entry per call inside the run
};

// Warms up with `warmup` calls of `call(0)`, then times `batch`, which
// receives a per-call timer wrapping each sample it processes.
// An iterative method loops over the test set calling the timer once per row;
// a batched method wraps its single pass in one timer call.
using SampleTimer = std::function<void(const std::function<void()>&)>;
BatchTiming measure_batch_latency(const std::function<void(const SampleTimer&)>& batch,
                                  const std::function<void(std::size_t)>& call,
                                  std::size_t warmup = kLatencyWarmup, const Clock& clock = default_clock());

}  // namespace recourse
