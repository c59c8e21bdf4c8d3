#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "recourse/benchmark/metrics.hpp"
#include "recourse/engines/countergan.hpp"
#include "recourse/engines/csgp.hpp"
#include "recourse/engines/rgd.hpp"

namespace recourse {

// Trained artifacts the benchmark and the service run against.
// `autoencoder.prototypes` must be set for CSGP.
struct ModelBundle {
  ClassifierModel classifier;
  AutoencoderModel autoencoder;
  GanModels gan;

  // Throws SpecError when the three schemas differ or prototypes are missing.
  void validate() const;
  const ProfileSchema& schema() const { return *classifier.schema; }
};

struct BenchmarkConfig {
  RgdConfig rgd;
  CsgpConfig csgp;
  bool countergan_enforce_bounds = true;
  std::size_t warmup = kLatencyWarmup;
  std::uint64_t data_seed = 0;  // recorded in the report only
};

// One test row under one method. Metric fields are meaningless when !ok.
struct SampleRecord {
  std::size_t row_id = 0;
  bool ok = false;
  std::string error;
  CfResult result;
  double realism = 0.0;
  double prediction_gain = 0.0;
  double actionability = 0.0;
  double latency_ms = 0.0;
};

struct MetricRecord {
  Metric metric = Metric::realism;
  Vector values;  // per successful sample; empty for batch latency
  double mean = 0.0;
  double ci_half_width = 0.0;
};

struct MethodReport {
  Method method = Method::rgd;
  std::vector<SampleRecord> samples;  // test-set order
  std::map<Metric, MetricRecord> metrics;
  std::size_t successes = 0;
  std::size_t failures = 0;
};

struct BenchmarkReport {
  std::map<Method, MethodReport> methods;
  std::size_t n_rows = 0;
  std::uint64_t data_seed = 0;
  double classifier_accuracy = 0.0;
  std::string timestamp;  // UTC, ISO 8601
};

// Aggregates per-sample values of the successful samples into `metrics`;
// the batch latency record is left to the caller.
void aggregate(MethodReport& report);

// Every test row through every method. A method error on one row is recorded
// on that sample and counted as a failure. Latency is measured sequentially.
BenchmarkReport run_benchmark(const ModelBundle& models, const Dataset& test, const BenchmarkConfig& config = {});

}  // namespace recourse
