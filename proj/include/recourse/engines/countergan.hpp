#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recourse/engines/result.hpp"
#include "recourse/numerics/rand.hpp"
#include "recourse/profiles/dataset.hpp"

namespace recourse {

struct CounterganConfig {
  double reg_weight = 1.0;  // weight of ||G(x)||^2, keeps counterfactuals close
  int target_class = 1;
  MlpSpec generator_spec;      // residual generator G
  MlpSpec discriminator_spec;  // realism critic D
  double generator_lr = 2e-4;
  double discriminator_lr = 2e-4;
  double beta1 = 0.5;
  std::size_t batch_size = 64;
  std::size_t steps = 2000;
  std::uint64_t seed = 13;

  void validate(std::size_t width) const;
};

// G: width -> 64 relu -> 64 relu -> width linear
// D: width -> 32 relu -> 16 relu -> 1 sigmoid
CounterganConfig default_countergan_config(std::size_t width);

struct GanLossTrace {
  Vector d_loss;
  Vector g_loss;
};

struct GanModels {
  MlpParams generator;
  MlpParams discriminator;
  GanLossTrace losses;
  CounterganConfig config;
  std::shared_ptr<const ProfileSchema> schema;
};

// Alternating updates against the fixed classifier. Per step, on one
// minibatch x with x~ = x + mask * G(x):
//   D descends  -log D(x) - log(1 - D(x~))
//   G descends  -log D(x~) - log C_t(x~) + reg_weight * ||G(x)||^2
// Throws TrainingError carrying the step index on a non-finite loss.
GanModels countergan_train(const ClassifierModel& classifier, const Dataset& train, const ProfileSchema& schema,
                           const CounterganConfig& config, Rand& rng);

// Generator output with immutable coordinates zeroed, one row per input row.
Matrix masked_residuals(const GanModels& gan, const Matrix& rows);

// Single forward pass, then finalize (bounds enforced by default).
CfResult countergan_generate(const GanModels& gan, const ClassifierModel& classifier, const RawProfile& x,
                             const ProfileSchema& schema, bool enforce_bounds = true);

// One batched generator pass over every row of `raw_rows`.
std::vector<CfResult> countergan_generate_batch(const GanModels& gan, const ClassifierModel& classifier,
                                                const Matrix& raw_rows, const ProfileSchema& schema,
                                                bool enforce_bounds = true);

nlohmann::json gan_to_json(const GanModels& gan);
GanModels gan_from_json(const nlohmann::json& doc);
void save_gan(const GanModels& gan, const std::filesystem::path& path);
GanModels load_gan(const std::filesystem::path& path);

// "step,d_loss,g_loss" rows.
std::string loss_trace_csv(const GanModels& gan);

}  // namespace recourse
